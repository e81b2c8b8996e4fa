"""Measure how candidate count and temperature trade off contour fit.

Usage: python3 scripts/fit_tradeoff.py --model reference.ckpt
For each (candidates, temperature) cell: mean component-MSE of the selected
candidate and mean Pearson correlation between the target curve and the
realized curve, over --trials random targets drawn from the model's own
component statistics.
"""

import argparse

import numpy as np

from midi_draw.checkpoint import load_checkpoint
from midi_draw.contour import ContourComponents, components_to_curve, extract_components
from midi_draw.generate import GenerationRequest, generate
from midi_draw.rng import make_rng


def cell(params, targets, seeds, n_candidates, temperature):
    mses, corrs = [], []
    for target, seed in zip(targets, seeds):
        req = GenerationRequest(
            target=target, n_candidates=n_candidates, temperature=temperature, seed=seed
        )
        res = generate(params, req)
        realized = components_to_curve(extract_components(res.best.astype(np.float64)))
        mses.append(res.fit_mse)
        corrs.append(np.corrcoef(res.curve, realized)[0, 1])
    return float(np.mean(mses)), float(np.mean(corrs))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--model", required=True)
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    params = load_checkpoint(args.model)
    rng = make_rng(args.seed)
    targets = [
        ContourComponents(*rng.normal(params.stats.mean, params.stats.std))
        for _ in range(args.trials)
    ]
    seeds = [int(rng.integers(2**62)) for _ in range(args.trials)]

    print(f"{'candidates':>10} {'temp':>5} {'mean_mse':>10} {'mean_corr':>10}")
    for n_candidates in (1, 4, 16, 64):
        for temperature in (0.5, 1.0, 1.5):
            mse, corr = cell(params, targets, seeds, n_candidates, temperature)
            print(f"{n_candidates:>10} {temperature:>5.1f} {mse:>10.4f} {corr:>10.4f}")


if __name__ == "__main__":
    main()
