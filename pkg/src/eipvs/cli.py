"""Command-line interface: ``eipvs <command> [options]``."""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from .evaluation import NU_GRID, confusion_matrix, select_nu, test_error, cbf_generate
from .index import index_corpus, load_index, query_knn, save_index
from .io import DEFAULT_EPSILON, emit, load_ucr, read_corpus, read_family, read_series, write_family, write_ucr
from .kernels import KINDS, KernelSpec, check_psd, gram_matrix, write_gram_csv, write_precomputed_kernel
from .orthogonal import gram_schmidt, make_sincos_basis, make_spike_basis
from .product import ElasticParams, eip, eip_distance, eip_norm
from .sequences import SymbolSequence, Weighting, compute_idf, ecos, eip_tm
from .timing import BENCH_DISTANCES, growth_exponent, timing_bench, write_timing_csv


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _common():
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--nu", type=float, default=1.0, help="stiffness (default 1)")
    g.add_argument("--kernel", choices=("gaussian", "laplace"), default="gaussian", help="time kernel")
    g.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON, help="replacement for zero values")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--threads", type=int, default=1)
    g.add_argument("--format", choices=("csv", "json"), default="csv", dest="fmt")
    return p


def _params(args, **kw):
    return ElasticParams(nu=args.nu, kernel=args.kernel, **kw)


def _out(args):
    path = getattr(args, "out", None)
    return open(path, "w", encoding="utf-8", newline="") if path else None


def _emit(args, records):
    fh = _out(args)
    try:
        emit(records, args.fmt, fh or sys.stdout)
    finally:
        if fh:
            fh.close()


# --- commands -----------------------------------------------------------------


def cmd_eip(args):
    A, B = read_series(args.a), read_series(args.b)
    p = _params(args)
    _emit(args, [{
        "nu": p.nu,
        "eip": float(eip(A, B, p)),
        "distance": float(eip_distance(A, B, p)),
        "norm_a": float(eip_norm(A, p)),
        "norm_b": float(eip_norm(B, p)),
    }])


def cmd_index_build(args):
    data = load_ucr(args.data, epsilon=args.epsilon)
    idx = index_corpus(data, nu=args.nu, kernel=args.kernel)
    save_index(idx, args.out)
    print(f"indexed {len(idx)} series on a grid of {idx.matrix.n} timestamps -> {args.out}", file=sys.stderr)


def cmd_index_query(args):
    idx = load_index(args.index)
    if args.query:
        queries = [("query", read_series(args.query))]
    else:
        data = load_ucr(args.queries, epsilon=args.epsilon)
        queries = list(zip(data.ids, data.items))
    records = []
    for qid, q in queries:
        for rank, (iid, label, dist) in enumerate(query_knn(idx, q, args.k), start=1):
            records.append({"query": qid, "rank": rank, "id": iid, "label": label, "distance": dist})
    args.out = None
    _emit(args, records)


def cmd_knn(args):
    train = load_ucr(args.train, epsilon=args.epsilon, split="train")
    test = load_ucr(args.test, epsilon=args.epsilon, split="test")
    rec = {"distance": args.distance}
    if args.distance == "eip":
        if args.fixed_nu:
            nu, loo = args.nu, None
        else:
            nu, loo, _ = select_nu(train, args.grid, args.kernel, args.threads)
        rec.update(nu=nu, loo_error=loo)
        params = ElasticParams(nu=nu, kernel=args.kernel)
    else:
        params = ElasticParams()
    err, pred = test_error(train, test, args.distance, params, args.k, args.threads, return_predictions=True)
    classes, M = confusion_matrix(test.labels, pred, sorted(set(train.labels) | set(test.labels)))
    rec.update(test_error=err, n_train=len(train), n_test=len(test))
    if args.fmt == "json":
        rec.update(classes=classes, confusion=M)
    _emit(args, [rec])
    if args.fmt == "csv":
        print("confusion (rows true, cols predicted): " + " ".join(classes), file=sys.stderr)
        for c, row in zip(classes, M):
            print(f"  {c}: " + " ".join(str(int(x)) for x in row), file=sys.stderr)


def cmd_gram(args):
    data = load_ucr(args.data, epsilon=args.epsilon)
    spec = KernelSpec(args.kind, _params(args), sigma=args.sigma, p=args.p, rate=args.rate)
    K = gram_matrix(spec, data, args.threads)
    if args.out:
        write_gram_csv(args.out, K, data.ids)
    if args.libsvm:
        write_precomputed_kernel(args.libsvm, K, data.labels)
    rep = check_psd(K)
    args.out = None
    _emit(args, [{"kind": spec.kind, "m": K.shape[0], "min_eigenvalue": rep.min_eigenvalue,
                  "max_eigenvalue": rep.max_eigenvalue, "psd": rep.is_psd}])


def cmd_ortho(args):
    if args.family:
        fam = read_family(args.family)
        ids, family = list(fam), list(fam.values())
    elif args.sincos:
        family = make_sincos_basis(args.sincos, args.length, args.epsilon)
        ids = [f"{f}{k}" for k in range(1, args.sincos + 1) for f in ("sin", "cos")]
    else:
        family = make_spike_basis(args.spike, args.epsilon)
        ids = [str(k) for k in range(1, args.spike + 1)]
    p = _params(args, precision=args.precision)
    basis = gram_schmidt(family, p)
    if args.out:
        flat = [s.with_values(np.asarray(s.values, dtype=np.float64)) if s.is_object else s for s in basis]
        write_family(flat, args.out, ids)
    worst = 0.0
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            worst = max(worst, abs(float(eip(basis[i], basis[j], p))))
    norm_err = max(abs(float(eip(q, q, p)) - 1.0) for q in basis)
    args.out = None
    _emit(args, [{"members": len(basis), "max_cross_product": worst, "max_norm_error": norm_err}])


def cmd_ecos(args):
    make = SymbolSequence.from_string if args.chars else SymbolSequence.from_text
    if args.weighting == "idf":
        if not args.corpus:
            raise SystemExit("ecos: --weighting idf needs --corpus")
        idf = compute_idf(read_corpus(args.corpus).items, smooth=args.smooth_idf)
        w = Weighting("idf", idf=idf)
    else:
        w = Weighting("indicator")
    A, B = make(args.a), make(args.b)
    _emit(args, [{"nu": args.nu, "eip": eip_tm(A, B, args.nu, w), "ecos": ecos(A, B, args.nu, w)}])


def cmd_bench(args):
    rows = timing_bench(args.lengths, args.series, args.distances, args.repeats, args.nu, args.seed)
    fh = _out(args)
    try:
        if args.fmt == "json":
            emit([r.__dict__ for r in rows], "json", fh or sys.stdout)
        else:
            write_timing_csv(rows, fh or sys.stdout)
    finally:
        if fh:
            fh.close()
    if len(set(args.lengths)) > 1:
        for d in args.distances:
            print(f"{d}: growth exponent {growth_exponent(rows, d):.2f}", file=sys.stderr)


def cmd_cbf(args):
    data = cbf_generate(args.per_class, args.length, args.seed, args.epsilon)
    if args.out:
        write_ucr(data, args.out)
    else:
        for s, label in data:
            print(",".join([label, *(repr(float(v)) for v in s.values[:, 0])]))


# --- parser -------------------------------------------------------------------


def build_parser():
    common = _common()
    parser = argparse.ArgumentParser(prog="eipvs", description="Elastic inner products for time series.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    p = sub.add_parser("eip", parents=[common], help="product and distance of two series files")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--out")
    p.set_defaults(func=cmd_eip)

    p = sub.add_parser("index", help="build or query a precomputed index")
    isub = p.add_subparsers(dest="action", metavar="action")
    isub.required = True
    b = isub.add_parser("build", parents=[common], help="index a UCR-format file")
    b.add_argument("--data", required=True)
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_index_build)
    q = isub.add_parser("query", parents=[common], help="nearest indexed series")
    q.add_argument("--index", required=True)
    src = q.add_mutually_exclusive_group(required=True)
    src.add_argument("--query", help="series file (t v1 ...)")
    src.add_argument("--queries", help="UCR-format file of queries")
    q.add_argument("--k", type=int, default=1)
    q.set_defaults(func=cmd_index_query)

    p = sub.add_parser("knn", parents=[common], help="k-NN classification with stiffness selection")
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--distance", choices=("eip", "ed", "dtw"), default="eip")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--grid", type=_float_list, default=list(NU_GRID), help="comma-separated stiffness grid")
    p.add_argument("--fixed-nu", action="store_true", help="use --nu instead of selecting it")
    p.add_argument("--out")
    p.set_defaults(func=cmd_knn)

    p = sub.add_parser("gram", parents=[common], help="kernel matrix export")
    p.add_argument("--data", required=True)
    p.add_argument("--kind", choices=KINDS, default="gaussian_eip")
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--rate", type=float, default=1.0)
    p.add_argument("--out", help="CSV matrix with ids")
    p.add_argument("--libsvm", help="LIBSVM precomputed-kernel file")
    p.set_defaults(func=cmd_gram)

    p = sub.add_parser("ortho", parents=[common], help="Gram-Schmidt orthonormalisation")
    fam = p.add_mutually_exclusive_group()
    fam.add_argument("--family", help="CSV series_id,timestamp,value")
    fam.add_argument("--spike", type=int, default=11, help="spike family size (default)")
    fam.add_argument("--sincos", type=int, help="number of sin/cos pairs")
    p.add_argument("--length", type=int, default=128, help="samples per sin/cos member")
    p.add_argument("--precision", type=int, help="decimal digits (mpmath) instead of double")
    p.add_argument("--out")
    p.set_defaults(func=cmd_ortho)

    p = sub.add_parser("ecos", parents=[common], help="elastic cosine of two token sequences")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--chars", action="store_true", help="one token per character")
    p.add_argument("--weighting", choices=("indicator", "idf"), default="indicator")
    p.add_argument("--corpus", help="corpus for idf weights")
    p.add_argument("--smooth-idf", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_ecos)

    p = sub.add_parser("bench", parents=[common], help="timing curves")
    p.add_argument("--lengths", type=lambda s: [int(x) for x in _float_list(s)], default=[10, 100, 1000])
    p.add_argument("--series", type=int, default=100)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--distances", type=lambda s: s.split(","), default=list(BENCH_DISTANCES))
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("cbf", parents=[common], help="generate Cylinder-Bell-Funnel data (UCR format)")
    p.add_argument("--per-class", type=int, default=10)
    p.add_argument("--length", type=int, default=128)
    p.add_argument("--out")
    p.set_defaults(func=cmd_cbf)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "command", None) == "bench":
        bad = [d for d in args.distances if d not in BENCH_DISTANCES]
        if bad:
            parser.error(f"unknown bench distance(s): {', '.join(bad)}")
    try:
        args.func(args)
    except (ValueError, ArithmeticError, OSError) as exc:
        print(f"eipvs {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
