#!/usr/bin/env python3
"""
Classification accuracy of GL, WNLL, NTV and WNTV at three label budgets on MNIST.

Desk scale (default): a stratified 7,000-point subset with 70 labels, then 10
and 5 labels per class. With --full all 70,000 points are used with 700, 100
and 50 labels.

The four IDX files (train and test, raw or .gz) are concatenated.

Usage:
    MNIST_DIR=~/data/mnist python scripts/run_mnist_table.py
    python scripts/run_mnist_table.py --mnist-dir ~/data/mnist --full --seed 3
"""
import argparse
import logging
import os
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from app.config import settings  # noqa: E402
from app.constants import MNIST_DESK_BUDGETS, MNIST_DESK_SIZE, MNIST_FULL_BUDGETS  # noqa: E402
from app.models.requests import SolverKind  # noqa: E402
from app.services.mnist_loader import load_mnist_dir  # noqa: E402
from app.services.point_graph import build_weight_graph  # noqa: E402
from app.services.ssl_cluster import run_ssl, sample_label_set, stratified_subset  # noqa: E402


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--mnist-dir", type=Path, default=os.getenv("MNIST_DIR"))
    parser.add_argument("--full", action="store_true", help="Use all 70,000 points")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    if args.mnist_dir is None:
        raise SystemExit("set MNIST_DIR or pass --mnist-dir")

    logging.basicConfig(level=logging.WARNING, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')

    dataset = load_mnist_dir(Path(args.mnist_dir).expanduser())
    budgets = MNIST_FULL_BUDGETS
    if not args.full:
        dataset = stratified_subset(dataset, MNIST_DESK_SIZE, args.seed)
        budgets = MNIST_DESK_BUDGETS

    graph_options = settings.ssl.graph
    graph = build_weight_graph(dataset.cloud, graph_options.k_sparsify, graph_options.r_sigma, method="tree")

    header = f"{'labels':>14} " + " ".join(f"{kind.value:>8}" for kind in SolverKind)
    print(header)
    print("-" * len(header))
    for count in budgets:
        labeled = sample_label_set(dataset, count, args.seed, stratified=True)
        row = []
        for kind in SolverKind:
            result = run_ssl(dataset, labeled, kind, settings.solver_options, graph=graph)
            row.append(f"{result.accuracy_all:8.2f}")
        print(f"{f'{count}/{dataset.n}':>14} " + " ".join(row))
    return 0


if __name__ == "__main__":
    sys.exit(main())
