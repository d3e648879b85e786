"""Communication-efficient distributed linear classification and LP solving."""

from .comm import CommLedger, Message, Network, Party
from .learner import InseparableError, LearnerConfig, train, train_reporting
from .protocols import PROTOCOLS, MwuConfig, ProtocolResult, make_parties, run_k_party, run_two_party
from .sampling import SampleSizeParams, guarantee_sample_size, sample_size
from .types import LabeledPoint, LinearClassifier, MajorityEnsemble, WeightedDataset

__version__ = "0.1.0"

__all__ = [
    "CommLedger",
    "InseparableError",
    "LabeledPoint",
    "LearnerConfig",
    "LinearClassifier",
    "MajorityEnsemble",
    "Message",
    "MwuConfig",
    "Network",
    "PROTOCOLS",
    "Party",
    "ProtocolResult",
    "SampleSizeParams",
    "WeightedDataset",
    "__version__",
    "guarantee_sample_size",
    "make_parties",
    "run_k_party",
    "run_two_party",
    "sample_size",
    "train",
    "train_reporting",
]
