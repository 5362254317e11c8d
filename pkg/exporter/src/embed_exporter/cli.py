"""Command-line entry point for the embedding exporter."""

from __future__ import annotations

import argparse
import sys

from .corpus_io import CorpusReadError, FramePlan
from .exporter import ExportError, ExportJob, export_embeddings

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="embed-exporter",
        description="Export per-(word, time frame) average contextual embeddings "
                    "to the driftscope interchange TSV.")
    parser.add_argument("--corpus", required=True, help="corpus file or directory")
    parser.add_argument("--format", choices=["jsonl", "directory"], default="jsonl")
    parser.add_argument("--frames", required=True,
                        help="time frames as label:start-end,label:start-end,...")
    parser.add_argument("--vocab", required=True, help="target words, one per line")
    parser.add_argument("--model", required=True,
                        help="pretrained encoder name or local path")
    parser.add_argument("--batch-size", type=int, default=16)
    parser.add_argument("--device", default="cpu")
    parser.add_argument("--out", required=True, help="output interchange TSV path")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        plan = FramePlan.parse(args.frames)
        job = ExportJob(
            corpus_path=args.corpus,
            corpus_format=args.format,
            plan=plan,
            vocab_path=args.vocab,
            model=args.model,
            batch_size=args.batch_size,
            device=args.device,
            out_path=args.out,
        )
        out = export_embeddings(job)
    except (CorpusReadError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    print(f"wrote {out}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
