"""Command-line entry points: dataset, train, generate, eval, serve.

Exit codes: 0 success, 1 usage error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .checkpoint import load_checkpoint, save_checkpoint
from .contour import ContourComponents, components_to_curve, extract_components
from .cvae import Hyperparams, train
from .dataset import PitchVocabulary, generate_dataset, load_dataset, save_dataset
from .generate import GenerationRequest, generate
from .midi import write_midi
from .rng import make_rng


def _seq_len(text: str) -> int:
    value = int(text)
    if value != 16:
        raise argparse.ArgumentTypeError(f"only sequences of length 16 are supported, got {value}")
    return value


def _components(text: str) -> ContourComponents:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected three comma-separated numbers, got {text!r}")
    try:
        return ContourComponents(*(float(p) for p in parts))
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="midi-draw", description="Contour-conditioned melody generation."
    )
    sub = parser.add_subparsers(dest="cmd")

    p = sub.add_parser("dataset", help="generate a synthetic melody corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--n", type=int, default=5000)
    p.add_argument("--len", type=_seq_len, default=16, dest="seq_len")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tau", type=float, default=2.0)

    p = sub.add_parser("train", help="train a model on a corpus")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--epochs", type=int, default=30)
    p.add_argument("--batch", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("generate", help="generate a melody from contour components")
    p.add_argument("--model", required=True)
    p.add_argument("--components", type=_components, required=True)
    p.add_argument("--candidates", type=int, default=64)
    p.add_argument("--temperature", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--midi")

    p = sub.add_parser("eval", help="measure conditioning quality of a checkpoint")
    p.add_argument("--model", required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--candidates", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--model")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--static")

    return parser


def _cmd_dataset(args) -> int:
    data = generate_dataset(tau=args.tau, n=args.n, seed=args.seed)
    save_dataset(data, args.out)
    print(f"wrote {args.n} records to {args.out}")
    return 0


def _cmd_train(args) -> int:
    data = load_dataset(args.data)
    h = Hyperparams(epochs=args.epochs, batch=args.batch, seed=args.seed)
    params, history = train(data, h)
    for i, (total, recon, kl) in enumerate(history):
        print(f"epoch {i + 1}/{len(history)} total {total:.4f} recon {recon:.4f} kl {kl:.4f}")
    save_checkpoint(params, args.out)
    print(f"saved checkpoint to {args.out}")
    return 0


def _cmd_generate(args) -> int:
    params = load_checkpoint(args.model)
    req = GenerationRequest(
        target=args.components,
        n_candidates=args.candidates,
        temperature=args.temperature,
        seed=args.seed,
    )
    result = generate(params, req)
    vocab = PitchVocabulary(midi_low=params.hyper.vocab_low, size=params.hyper.vocab_size)
    if args.midi is not None:
        with open(args.midi, "wb") as f:
            f.write(write_midi(result.best, vocab))
    print(
        json.dumps(
            {
                "seed": result.seed,
                "best_index": result.best_index,
                "fit_mse": result.fit_mse,
                "pitches": vocab.tokens_to_midi(result.best).tolist(),
            }
        )
    )
    return 0


def eval_checkpoint(params, trials: int, n_candidates: int, seed: int):
    """Mean fit MSE and mean target/realized-curve Pearson correlation.

    Targets are drawn per component from N(stats.mean, stats.std), i.e. the
    contour distribution the model was trained on.
    """
    rng = make_rng(seed)
    mses = np.empty(trials)
    corrs = np.empty(trials)
    for i in range(trials):
        raw = rng.normal(params.stats.mean, params.stats.std)
        target = ContourComponents(*raw)
        req = GenerationRequest(
            target=target, n_candidates=n_candidates, seed=int(rng.integers(2**62))
        )
        result = generate(params, req)
        realized = components_to_curve(extract_components(result.best.astype(np.float64)))
        corrs[i] = np.corrcoef(result.curve, realized)[0, 1]
        mses[i] = result.fit_mse
    return float(mses.mean()), float(corrs.mean())


def _cmd_eval(args) -> int:
    params = load_checkpoint(args.model)
    mean_mse, mean_corr = eval_checkpoint(params, args.trials, args.candidates, args.seed)
    print(f"mean_fit_mse {mean_mse:.6f}")
    print(f"mean_correlation {mean_corr:.6f}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .server import ServiceConfig, create_app

    config = ServiceConfig(port=args.port, checkpoint_path=args.model, static_dir=args.static)
    uvicorn.run(create_app(config), host="127.0.0.1", port=config.port)
    return 0


_COMMANDS = {
    "dataset": _cmd_dataset,
    "train": _cmd_train,
    "generate": _cmd_generate,
    "eval": _cmd_eval,
    "serve": _cmd_serve,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code in (0, None) else 1
    if args.cmd is None:
        parser.print_usage(sys.stderr)
        return 1
    try:
        return _COMMANDS[args.cmd](args)
    except BrokenPipeError:
        raise
    except Exception as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def main_entry() -> None:
    sys.exit(main(sys.argv[1:]))
