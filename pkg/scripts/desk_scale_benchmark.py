"""
Desk-scale training benchmark: learned pipeline vs unweighted jet on sharp patches
"""

import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import click

from config.logging import setup_logging
from core.benchmark import TARGET_RATIO, desk_scale_benchmark
from storage.reports import write_loss_trace
from training.trainer import TrainConfig


@click.command()
@click.option("--epochs", type=int, default=30)
@click.option("--seed", type=int, default=0)
@click.option("--train-patches", type=int, default=2000)
@click.option("--test-patches", type=int, default=500)
@click.option("--trace", type=str, default=None, help="Write the loss trace CSV here.")
def main(epochs, seed, train_patches, test_patches, trace):
    """Train r=128, k=32, n=3 and compare held-out RMSE with the jet baseline"""
    setup_logging()
    config = TrainConfig(r=128, k=32, n=3, m=8, epochs=epochs, seed=seed)
    result = desk_scale_benchmark(config, train_patches, test_patches)

    print("=" * 60)
    print("SHARP-FEATURE BENCHMARK")
    print("=" * 60)
    print(f"  learned RMSE : {result.learned_rmse:.3f} deg")
    print(f"  jet RMSE     : {result.jet_rmse:.3f} deg")
    print(f"  ratio        : {result.ratio:.3f} (target <= {TARGET_RATIO})")
    print(f"  runtime      : {result.seconds:.0f} s")
    if trace:
        write_loss_trace(trace, result.trace)
    sys.exit(0 if result.passed else 1)


if __name__ == '__main__':
    main()
