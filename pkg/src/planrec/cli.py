"""Command-line entry points for corpus, training, recognition, and serving.

Exit codes: 0 on success, 1 on usage errors, 2 on data errors (bad files,
unknown actions, broken invariants).
"""

from __future__ import annotations

import argparse
import json
import sys

from .baseline import MatchConfig
from .corpus import (
    generate_blocks_corpus,
    generate_route_corpus,
    load_corpus,
    observation_from_tokens,
    parse_observation_tokens,
    save_corpus,
)
from .embedding import TrainConfig, load_model, save_model, train_skipgram
from .errors import PlanRecError
from .evaluate import ExperimentSpec, run_experiment, save_results
from .recognizer import EmConfig, em_recognize, exhaustive_recognize
from .service import (
    DEFAULT_OBSERVATION_CAP,
    create_app,
    model_digest,
    resolve_bind,
)


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures mapped to exit code 1."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="planrec", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen-corpus", help="synthesize a plan corpus")
    gen.add_argument("--domain", choices=["blocks", "route"], default="blocks")
    gen.add_argument("--plans", type=int, default=500)
    gen.add_argument("--blocks", type=int, default=8, help="blocks domain size")
    gen.add_argument("--locations", type=int, default=6, help="route domain size")
    gen.add_argument("--packages", type=int, default=4, help="route domain size")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)

    train = sub.add_parser("train", help="train an embedding model on a corpus")
    train.add_argument("--corpus", required=True)
    train.add_argument("--out", required=True)
    train.add_argument("--dim", type=int, default=64)
    train.add_argument("--window", type=int, default=3)
    train.add_argument("--epochs", type=int, default=5)
    train.add_argument("--learning-rate", type=float, default=0.025)
    train.add_argument("--seed", type=int, default=0)

    rec = sub.add_parser("recognize", help="complete an observation file")
    rec.add_argument("--model", required=True)
    rec.add_argument("--obs", required=True)
    rec.add_argument("--m", type=int, default=10)
    rec.add_argument("--iterations", type=int, default=300)
    rec.add_argument("--delta", type=float, default=0.1)
    rec.add_argument("--seed", type=int, default=0)

    ev = sub.add_parser("eval", help="run a cross-validated accuracy sweep")
    ev.add_argument("--domain", choices=["blocks", "route"], default="blocks")
    ev.add_argument("--plans", type=int, default=500)
    ev.add_argument("--blocks", type=int, default=8)
    ev.add_argument("--locations", type=int, default=6)
    ev.add_argument("--packages", type=int, default=4)
    ev.add_argument("--folds", type=int, default=10)
    ev.add_argument("--fold-limit", type=int, default=None)
    ev.add_argument(
        "--xi", type=float, nargs="+", default=[0.05, 0.10, 0.15, 0.20, 0.25]
    )
    ev.add_argument("--m-grid", type=int, nargs="+", default=list(range(1, 11)))
    ev.add_argument(
        "--recognizers",
        nargs="+",
        choices=["em", "match", "random"],
        default=["em", "match"],
    )
    ev.add_argument("--dim", type=int, default=64)
    ev.add_argument("--window", type=int, default=3)
    ev.add_argument("--epochs", type=int, default=5)
    ev.add_argument("--iterations", type=int, default=300)
    ev.add_argument("--delta", type=float, default=0.1)
    ev.add_argument("--seed", type=int, default=0)
    ev.add_argument("--out", required=True)
    ev.add_argument("--summary", default=None)

    srv = sub.add_parser("serve", help="serve suggestions over HTTP")
    srv.add_argument("--model", required=True)
    srv.add_argument("--bind", default=None, help="host:port (or PLANREC_BIND)")
    srv.add_argument("--iterations", type=int, default=300)
    srv.add_argument("--delta", type=float, default=0.1)
    srv.add_argument("--seed", type=int, default=0)
    srv.add_argument("--static", default=None, help="directory of web UI files")
    srv.add_argument(
        "--max-observation", type=int, default=DEFAULT_OBSERVATION_CAP
    )

    orc = sub.add_parser("oracle", help="exhaustive completion of tiny observations")
    orc.add_argument("--model", required=True)
    orc.add_argument("--obs", required=True)
    return parser


def _load_observation(path: str, vocabulary):
    with open(path, encoding="utf-8") as fh:
        tokens = parse_observation_tokens(fh.read())
    return observation_from_tokens(tokens, vocabulary)


def _cmd_gen_corpus(args) -> int:
    if args.domain == "blocks":
        library = generate_blocks_corpus(args.blocks, args.plans, args.seed)
    else:
        library = generate_route_corpus(
            args.locations, args.packages, args.plans, args.seed
        )
    save_corpus(library, args.out)
    print(f"wrote {len(library.plans)} plans to {args.out}")
    return 0


def _cmd_train(args) -> int:
    library = load_corpus(args.corpus)
    config = TrainConfig(
        dim=args.dim,
        window=args.window,
        epochs=args.epochs,
        learning_rate=args.learning_rate,
        seed=args.seed,
    )
    model = train_skipgram(library, config)
    save_model(model, args.out)
    print(f"wrote model {model_digest(model)} to {args.out}")
    return 0


def _cmd_recognize(args) -> int:
    model = load_model(args.model)
    observation = _load_observation(args.obs, model.vocabulary)
    config = EmConfig(
        iterations=args.iterations,
        delta=args.delta,
        m=args.m,
        window=model.window,
        seed=args.seed,
    )
    result = em_recognize(model, observation, config)
    vocab = model.vocabulary
    doc = {
        "holes": [
            {
                "position": x,
                "suggestions": [
                    {"action": vocab.token_of(o), "weight": w}
                    for o, w in result.suggestions[x]
                ],
            }
            for x in sorted(result.suggestions)
        ],
        "completed": [vocab.token_of(a) for a in result.completed],
        "objective": result.objective,
        "model_id": model_digest(model),
    }
    print(json.dumps(doc, indent=2))
    return 0


def _cmd_eval(args) -> int:
    spec = ExperimentSpec(
        domain=args.domain,
        n_plans=args.plans,
        n_blocks=args.blocks,
        n_locations=args.locations,
        n_packages=args.packages,
        folds=args.folds,
        fold_limit=args.fold_limit,
        xi_grid=tuple(args.xi),
        m_grid=tuple(args.m_grid),
        recognizers=tuple(args.recognizers),
        seed=args.seed,
        train=TrainConfig(dim=args.dim, window=args.window, epochs=args.epochs),
        em=EmConfig(
            iterations=args.iterations, delta=args.delta, window=args.window
        ),
        match=MatchConfig(window=args.window),
    )
    result = run_experiment(spec)
    save_results(result, args.out, args.summary)
    print(
        f"wrote {len(result.rows)} rows to {args.out} "
        f"(corpus: {result.n_plans} plans, {result.n_words} words, "
        f"{result.n_vocab} actions; skipped {result.skipped_plans})"
    )
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    model = load_model(args.model)
    defaults = EmConfig(
        iterations=args.iterations,
        delta=args.delta,
        seed=args.seed,
        window=model.window,
    )
    app = create_app(
        model,
        em_defaults=defaults,
        observation_cap=args.max_observation,
        static_dir=args.static,
    )
    host, port = resolve_bind(args.bind)
    uvicorn.run(app, host=host, port=port, log_level="info")
    return 0


def _cmd_oracle(args) -> int:
    model = load_model(args.model)
    observation = _load_observation(args.obs, model.vocabulary)
    completed, score = exhaustive_recognize(model, observation)
    vocab = model.vocabulary
    doc = {
        "completed": [vocab.token_of(a) for a in completed],
        "score": score,
    }
    print(json.dumps(doc, indent=2))
    return 0


_COMMANDS = {
    "gen-corpus": _cmd_gen_corpus,
    "train": _cmd_train,
    "recognize": _cmd_recognize,
    "eval": _cmd_eval,
    "serve": _cmd_serve,
    "oracle": _cmd_oracle,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except PlanRecError as exc:
        print(f"planrec: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"planrec: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
