"""
The calp.py batch command line: extract features from an image corpus into a
feature store, query a store, and write retrieval and recognition benchmark
reports as CSV.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, NoReturn, Optional, Sequence, TextIO

import pandas as pd

from . import __version__
from .config import BenchmarkConfig, makeConfig
from .dataset import loadImage, saveImage, scanDataset
from .descriptors import descriptorTable
from .encoding import calpCodeImage, calpOperationCount, renderFeatureImage
from .error import CalpError, ConfigError, ParameterError
from .evaluation import (
    Retrieval,
    averageRecognitionRate,
    crossValidatedRecognition,
    cumulativeMatch,
)
from .matching import rankGallery
from .store import FeatureStore

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

FLOAT_FORMAT = "%.6f"
NAN = float("nan")

# Command line option destinations that are configuration values.
CONFIG_OPTIONS = (
    "descriptor",
    "radius",
    "threshold",
    "seed",
    "folds",
    "fractions",
    "lambdaMin",
    "lambdaMax",
    "maxRank",
    "workers",
    "out",
)


class ArgumentParser(argparse.ArgumentParser):
    """
    An argument parser that exits with our usage error status.
    """

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, "%s: error: %s\n" % (self.prog, message))


def makeParser() -> argparse.ArgumentParser:
    """
    Make an argparse parser for the command line.

    @return: An C{argparse} parser.
    """
    common = argparse.ArgumentParser(add_help=False)

    common.add_argument(
        "--config",
        metavar="FILE",
        help=(
            "A JSON or TOML file of configuration values. Command line options "
            "override values given in the file."
        ),
    )

    common.add_argument(
        "--descriptor",
        choices=("calp", "lbp", "cslbp", "csltp"),
        help="The descriptor to extract (default calp).",
    )

    common.add_argument(
        "--radius",
        type=int,
        metavar="R",
        help="The CALP cascade depth: ring distances 1 to R are encoded (default 3).",
    )

    common.add_argument(
        "--threshold",
        type=float,
        metavar="T",
        help="The CSLBP (default 0) or CSLTP (default 1) threshold.",
    )

    common.add_argument(
        "--seed",
        type=int,
        help="The 64-bit unsigned seed for probe/gallery splits (default 0).",
    )

    common.add_argument(
        "--folds",
        type=int,
        help="The number of splits per probe fraction (default 10).",
    )

    common.add_argument(
        "--fractions",
        metavar="F1,F2,...",
        help="Comma-separated probe fractions (default 0.2,0.3,0.4,0.5,0.6).",
    )

    common.add_argument(
        "--lambda-min",
        dest="lambdaMin",
        type=int,
        metavar="N",
        help="The smallest number of retrieved images to report (default 1).",
    )

    common.add_argument(
        "--lambda-max",
        dest="lambdaMax",
        type=int,
        metavar="N",
        help="The largest number of retrieved images to report (default 10).",
    )

    common.add_argument(
        "--max-rank",
        dest="maxRank",
        type=int,
        metavar="N",
        help="The largest rank in the CMC table (default 10).",
    )

    common.add_argument(
        "--workers",
        type=int,
        metavar="N",
        help="The number of threads to use (default 1). Results do not depend on it.",
    )

    common.add_argument(
        "--out",
        "-o",
        metavar="FILE",
        help=(
            "The output file (for extract the feature store to write, for "
            "render the directory to write images to). Reports go to standard "
            "output if this is not given."
        ),
    )

    common.add_argument(
        "--verbose",
        "-v",
        action="store_true",
        help="Print progress information to standard error.",
    )

    parser = ArgumentParser(
        description=(
            "Extract CALP, LBP, CSLBP or CSLTP features from a directory-per-class "
            "image corpus and benchmark retrieval and recognition."
        ),
    )

    parser.add_argument("--version", action="version", version=__version__)

    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True

    extract = subparsers.add_parser(
        "extract",
        parents=[common],
        help="Extract the features of every image of a corpus to a feature store.",
    )
    extract.add_argument(
        "root",
        metavar="ROOT",
        help="The corpus directory, holding one subdirectory of images per class.",
    )

    retrieve = subparsers.add_parser(
        "retrieve",
        parents=[common],
        help="List the stored images nearest to a query image.",
    )
    retrieve.add_argument("store", metavar="STORE", help="A feature store file.")
    retrieve.add_argument(
        "query",
        metavar="QUERY",
        help=(
            "The query: either the path of an image in the store (relative to "
            "the corpus root) or an image file."
        ),
    )
    retrieve.add_argument(
        "--k",
        "-k",
        type=int,
        default=10,
        help="The number of images to list (default 10).",
    )

    evalRetrieval = subparsers.add_parser(
        "eval-retrieval",
        parents=[common],
        help="Write ARP, ARR, F-Score and ANMRR for a feature store as CSV.",
    )
    evalRetrieval.add_argument("store", metavar="STORE", help="A feature store file.")

    evalRecognition = subparsers.add_parser(
        "eval-recognition",
        parents=[common],
        help=(
            "Write the leave-one-out recognition rate, CMC, and cross-validated "
            "recognition rates for a feature store as CSV."
        ),
    )
    evalRecognition.add_argument(
        "store", metavar="STORE", help="A feature store file."
    )

    render = subparsers.add_parser(
        "render",
        parents=[common],
        help="Write the CALP feature image of each ring distance of an image.",
    )
    render.add_argument("image", metavar="IMAGE", help="The image to render.")

    subparsers.add_parser(
        "lengths",
        parents=[common],
        help="Print the micropattern bit counts and feature lengths as CSV.",
    )
    return parser


def writeCsv(df: pd.DataFrame, out: Optional[str], stdout: TextIO) -> None:
    """
    Write a report as CSV: comma-separated, header row, UTF-8, LF line endings,
    floats with 6 decimals and empty cells for missing values.

    @param df: The C{pd.DataFrame} to write.
    @param out: The C{str} output file name, or C{None} for C{stdout}.
    @param stdout: The open C{TextIO} to write to if C{out} is C{None}.
    """
    text = df.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    if out is None:
        stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fp:
            fp.write(text)


def cmdExtract(root: str, config: BenchmarkConfig, out: str) -> FeatureStore:
    """
    Extract the features of a corpus and save them.

    @param root: The C{str} corpus directory.
    @param config: A C{BenchmarkConfig} selecting the descriptor.
    @param out: The C{str} name of the feature store file to write.
    @raise DatasetError: If the corpus cannot be read.
    @raise DimensionError: If an image is too small for the descriptor.
    @return: The saved C{FeatureStore}.
    """
    descriptor = config.descriptorConfig()
    dataset = scanDataset(root, config.workers)
    if dataset.skipped:
        logger.warning(
            "%d file%s in %s could not be read as images and %s skipped.",
            len(dataset.skipped),
            "" if len(dataset.skipped) == 1 else "s",
            root,
            "was" if len(dataset.skipped) == 1 else "were",
        )
    store = FeatureStore.fromDataset(dataset, descriptor, config.workers)
    if descriptor.name == "calp":
        logger.info(
            "Encoding used %d primitive operations.",
            sum(
                calpOperationCount(image.height, image.width, descriptor.radius)
                for image in dataset.images
            ),
        )
    store.write(out)
    logger.info("Wrote %d feature vectors to %s.", len(store), out)
    return store


def cmdRetrieve(store: FeatureStore, query: str, k: int) -> pd.DataFrame:
    """
    Rank the stored images by distance to a query.

    @param store: A C{FeatureStore}.
    @param query: The C{str} relative path of a stored image, or the name of
        an image file.
    @param k: The C{int} number of images to list.
    @raise ParameterError: If C{k} is not between 1 and the number of images
        that can be listed.
    @raise ImageReadError: If the query is not stored and cannot be read.
    @return: A C{pd.DataFrame} with columns rank, path, class and distance.
    """
    queryIndex = store.index(query)

    if queryIndex is None:
        # A file name that points into the corpus is a stored query too.
        try:
            relative = Path(query).resolve().relative_to(Path(store.root).resolve())
        except ValueError:
            pass
        else:
            queryIndex = store.index(relative.as_posix())

    if queryIndex is None:
        vector = store.descriptor.extract(loadImage(query)).bins
    else:
        vector = store.vectors[queryIndex]

    available = len(store) - (0 if queryIndex is None else 1)
    if not 1 <= k <= available:
        raise ParameterError(
            "Cannot list %r images: the store can supply between 1 and %d."
            % (k, available)
        )

    ranked = rankGallery(vector, store.vectors, queryIndex)
    rows = [
        (rank, store.paths[index], store.labels[index], distance)
        for rank, (index, distance) in enumerate(ranked.top(k), start=1)
    ]
    return pd.DataFrame(rows, columns=["rank", "path", "class", "distance"])


def cmdEvalRetrieval(store: FeatureStore, config: BenchmarkConfig) -> pd.DataFrame:
    """
    Compute the retrieval benchmark of a feature store.

    @param store: A C{FeatureStore}.
    @param config: A C{BenchmarkConfig} giving the retrieval range.
    @raise ParameterError: If the retrieval range does not fit the store.
    @raise EvaluationError: If some class has a single image.
    @return: A C{pd.DataFrame} with columns lambda, ARP, ARR, F-Score and
        ANMRR: one row per number of retrieved images, then a summary row
        holding ANMRR.
    """
    config.checkLambdas(len(store))
    retrieval = Retrieval(store.featureSet(), config.workers)
    anmrr = retrieval.anmrr()
    rows: list[tuple[str, float, float, float, float]] = [
        (str(lam), arp, arr, fScore, NAN)
        for lam, arp, arr, fScore in retrieval.curve(config.lambdas()).itertuples(
            index=False
        )
    ]
    rows.append(("summary", NAN, NAN, NAN, anmrr))
    return pd.DataFrame(rows, columns=["lambda", "ARP", "ARR", "F-Score", "ANMRR"])


def cmdEvalRecognition(store: FeatureStore, config: BenchmarkConfig) -> pd.DataFrame:
    """
    Compute the recognition benchmark of a feature store.

    @param store: A C{FeatureStore}.
    @param config: A C{BenchmarkConfig} giving the CMC rank, probe fractions,
        folds and seed.
    @raise EvaluationError: If some class has a single image.
    @return: A C{pd.DataFrame} in long form with columns measure, fraction,
        fold, rank and value. Measures are 'recognition-rate' (leave-one-out
        percentage), 'cmc' (one row per rank), 'fold-rate' (percentage per
        fraction and fold), 'fraction-mean' and 'average'. Values are empty for
        a fraction too small to give any probe images.
    """
    features = store.featureSet()
    retrieval = Retrieval(features, config.workers)

    rows: list[tuple[str, Optional[float], Optional[int], Optional[int], float]] = []
    append = rows.append

    firstRanks = retrieval.firstMatchRanks()
    append(("recognition-rate", None, None, None, retrieval.recognitionRate()))
    for rank, score in enumerate(cumulativeMatch(firstRanks, config.maxRank), start=1):
        append(("cmc", None, None, rank, score))

    results = crossValidatedRecognition(
        features, config.fractions, config.folds, config.seed, workers=config.workers
    )
    for result in results:
        for fold, rate in enumerate(result.foldRates):
            append(("fold-rate", result.fraction, fold, None, rate))
        append(("fraction-mean", result.fraction, None, None, result.mean))
    if any(result.usable for result in results):
        average = averageRecognitionRate(results)
    else:
        average = NAN
    append(("average", None, None, None, average))

    df = pd.DataFrame(rows, columns=["measure", "fraction", "fold", "rank", "value"])
    df["fraction"] = df["fraction"].astype("float64")
    df["fold"] = df["fold"].astype("Int64")
    df["rank"] = df["rank"].astype("Int64")
    return df


def cmdRender(imageFile: str, config: BenchmarkConfig, out: str) -> list[Path]:
    """
    Write the CALP feature image of each ring distance of an image.

    @param imageFile: The C{str} name of the image file.
    @param config: A C{BenchmarkConfig} giving the cascade depth.
    @param out: The C{str} directory to write to (created if needed).
    @raise ImageReadError: If the image cannot be read or written.
    @raise DimensionError: If the image is too small for the cascade depth.
    @return: A C{list} of the C{Path}s written, one per ring distance.
    """
    image = loadImage(imageFile)
    outDir = Path(out)
    outDir.mkdir(parents=True, exist_ok=True)
    stem = Path(imageFile).stem
    written = []
    for d in range(1, config.radius + 1):
        path = outDir / ("%s-D%d.png" % (stem, d))
        saveImage(renderFeatureImage(calpCodeImage(image, d)), path)
        written.append(path)
    return written


def cmdLengths(config: BenchmarkConfig) -> pd.DataFrame:
    rows = descriptorTable(config.radius)
    df = pd.DataFrame(rows, columns=["descriptor", "bits", "bins"])
    df["bits"] = df["bits"].astype("Int64")
    return df


def configFromArgs(args: argparse.Namespace) -> BenchmarkConfig:
    overrides: dict[str, Any] = {
        name: getattr(args, name) for name in CONFIG_OPTIONS if hasattr(args, name)
    }
    return makeConfig(args.config, overrides)


def run(args: argparse.Namespace, stdout: TextIO) -> None:
    config = configFromArgs(args)

    if args.command == "extract":
        if config.out is None:
            raise ParameterError("extract needs an output file (use --out).")
        cmdExtract(args.root, config, config.out)
    elif args.command == "retrieve":
        store = FeatureStore.read(args.store)
        writeCsv(cmdRetrieve(store, args.query, args.k), config.out, stdout)
    elif args.command == "eval-retrieval":
        store = FeatureStore.read(args.store)
        writeCsv(cmdEvalRetrieval(store, config), config.out, stdout)
    elif args.command == "eval-recognition":
        store = FeatureStore.read(args.store)
        writeCsv(cmdEvalRecognition(store, config), config.out, stdout)
    elif args.command == "render":
        if config.out is None:
            raise ParameterError("render needs an output directory (use --out).")
        for path in cmdRender(args.image, config, config.out):
            logger.info("Wrote %s.", path)
    else:
        assert args.command == "lengths"
        writeCsv(cmdLengths(config), config.out, stdout)


def main(argv: Optional[Sequence[str]] = None, stdout: TextIO = sys.stdout) -> int:
    """
    Run the command line.

    @param argv: A sequence of C{str} arguments, or C{None} to use
        C{sys.argv[1:]}.
    @param stdout: The open C{TextIO} reports are written to when no output
        file is given.
    @return: An C{int} exit status: 0 for success, 1 for a usage error, 2 for
        a data error.
    """
    parser = makeParser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    logging.basicConfig(
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
        level=logging.INFO if args.verbose else logging.WARNING,
    )

    try:
        run(args, stdout)
    except (ParameterError, ConfigError) as e:
        print("%s: error: %s" % (parser.prog, e), file=sys.stderr)
        return EXIT_USAGE
    except CalpError as e:
        print("%s: error: %s" % (parser.prog, e), file=sys.stderr)
        return EXIT_DATA

    return EXIT_OK
