from .dataset import Dataset, GrayImage, loadImage, makeSplits, scanDataset
from .descriptors import DescriptorConfig, extractAll
from .encoding import calpCode, calpCodeImage, calpFeature, calpHistogram
from .evaluation import Retrieval, crossValidatedRecognition
from .matching import FeatureSet, chiSquare, rankGallery
from .store import FeatureStore

__all__ = [
    "Dataset",
    "DescriptorConfig",
    "FeatureSet",
    "FeatureStore",
    "GrayImage",
    "Retrieval",
    "calpCode",
    "calpCodeImage",
    "calpFeature",
    "calpHistogram",
    "chiSquare",
    "crossValidatedRecognition",
    "extractAll",
    "loadImage",
    "makeSplits",
    "rankGallery",
    "scanDataset",
]

# Note that the version string must have the following format, otherwise it
# will not be found by the version() function in ../setup.py
__version__ = "1.0.0"
