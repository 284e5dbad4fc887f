"""Command-line interface.

Subcommands: extract | attrs | mos | train | predict | eval. All consume
a manifest CSV (id,video,audio,group,mos) and/or the CSV/JSON artifacts
produced by earlier stages; errors go to stderr with a nonzero exit.
"""

import argparse
import csv
import os
import sys

from . import attributes, evaluation, features, media, regressor, subjective


def build_parser():
    parser = argparse.ArgumentParser(
        prog="avqa", description="Audio-visual quality assessment toolkit"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="extract model-input features to a CSV cache")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--stride", type=int, default=10)
    p.add_argument(
        "--no-audio-features",
        action="store_true",
        help="emit the video-only feature layout",
    )

    p = sub.add_parser("attrs", help="compute content attributes per sequence")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--stride", type=int, default=10)
    p.add_argument("--hist-bins", type=int, default=0,
                   help="also write per-attribute histogram CSVs with this many bins")

    p = sub.add_parser("mos", help="process raw subjective scores into MOS")
    p.add_argument("--raw", required=True)
    p.add_argument("--screen", choices=["bt500", "none"], default="bt500")
    p.add_argument("--out", required=True)

    p = sub.add_parser("train", help="grid-search and train one model")
    p.add_argument("--manifest", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("predict", help="score sequences with a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("eval", help="run the split/repeat evaluation protocol")
    p.add_argument("--manifest", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--repeats", type=int, default=100)
    p.add_argument("--ratio", type=float, default=0.8)
    p.add_argument("--seed", type=int, default=0)
    return parser


def cmd_extract(args):
    manifest = evaluation.DatasetManifest.load_csv(args.manifest)
    names = None
    rows = {}
    for entry in manifest.entries:
        vec = features.extract_features(
            entry.video, entry.audio, stride=args.stride,
            with_audio=not args.no_audio_features,
        )
        names = vec.names
        rows[entry.id] = vec.values
    features.FeatureTable(names, rows).save_csv(args.out)
    print(f"wrote {len(rows)} feature rows to {args.out}")


def cmd_attrs(args):
    manifest = evaluation.DatasetManifest.load_csv(args.manifest)
    table = []
    for entry in manifest.entries:
        seq = media.load_y4m(entry.video)
        audio = media.load_wav(entry.audio)
        video_attrs, audio_attrs = attributes.compute_attributes(
            seq, audio, stride=args.stride
        )
        for flag in video_attrs.flags + audio_attrs.flags:
            print(f"note: {entry.id}: {flag}", file=sys.stderr)
        table.append((entry.id, *attributes.attribute_row(video_attrs, audio_attrs)))
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", *attributes.ATTRIBUTE_NAMES])
        for row in table:
            writer.writerow([row[0], *(repr(float(v)) for v in row[1:])])
    if args.hist_bins > 0:
        stem, _ = os.path.splitext(args.out)
        for k, name in enumerate(attributes.ATTRIBUTE_NAMES):
            values = [row[k + 1] for row in table]
            attributes.write_histogram_csv(f"{stem}_hist_{name}.csv", values, args.hist_bins)
    print(f"wrote attributes for {len(table)} sequences to {args.out}")


def cmd_mos(args):
    raw = subjective.load_score_csv(args.raw)
    table, clipped = subjective.process_scores(raw, screen=args.screen)
    subjective.save_mos_csv(table, args.out)
    sidecar = args.out + ".rejected_subjects.csv"
    with open(sidecar, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["subject"])
        for subject in table.rejected_subjects:
            writer.writerow([subject])
    print(
        f"wrote {len(table.sequences)} MOS rows to {args.out} "
        f"({len(table.rejected_subjects)} subject(s) rejected, {clipped} clipped scores)"
    )


def _training_matrix(manifest, table):
    ids = manifest.ids()
    missing = [i for i in ids if i not in table.rows]
    if missing:
        raise ValueError(f"features missing for ids: {missing[:5]}")
    mos = manifest.mos_by_id()
    X = table.matrix(ids)
    y = [mos[i] for i in ids]
    return ids, X, y


def cmd_train(args):
    manifest = evaluation.DatasetManifest.load_csv(args.manifest)
    table = features.FeatureTable.load_csv(args.features)
    _, X, y = _training_matrix(manifest, table)
    params, model, report = regressor.grid_search(X, y, seed=args.seed)
    model.feature_names = table.names
    regressor.save_model(model, args.out)
    print(
        f"trained on {len(y)} sequences: C={params['C']} gamma={params['gamma']} "
        f"epsilon={params['epsilon']} train_rmse={report.train_rmse:.4f} -> {args.out}"
    )


def cmd_predict(args):
    model = regressor.load_model(args.model)
    table = features.FeatureTable.load_csv(args.features)
    if model.feature_names and tuple(table.names) != tuple(model.feature_names):
        raise ValueError("feature layout differs from the model's training layout")
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "prediction"])
        for seq_id, vec in table.rows.items():
            writer.writerow([seq_id, repr(float(regressor.predict(model, vec)))])
    print(f"wrote {len(table.rows)} predictions to {args.out}")


def cmd_eval(args):
    manifest = evaluation.DatasetManifest.load_csv(args.manifest)
    table = features.FeatureTable.load_csv(args.features)
    report = evaluation.run_protocol(
        manifest, table, repeats=args.repeats, ratio=args.ratio, master_seed=args.seed
    )
    report.save_json(args.out)
    agg = report.aggregate
    print(
        f"{args.repeats} repeats at ratio {args.ratio}: "
        f"SRCC mean {agg['srcc_mean']:.4f} / PLCC mean {agg['plcc_mean']:.4f} / "
        f"RMSE mean {agg['rmse_mean']:.4f} ({agg['n_failed']} failed) -> {args.out}"
    )


_COMMANDS = {
    "extract": cmd_extract,
    "attrs": cmd_attrs,
    "mos": cmd_mos,
    "train": cmd_train,
    "predict": cmd_predict,
    "eval": cmd_eval,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _COMMANDS[args.command](args)
    except Exception as exc:
        print(f"avqa {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
