"""Command-line interface.  Results are JSON on standard output.

Exit codes: 0 success, 1 malformed input, 2 domain error, 3 search bound exceeded."""

import argparse
import json
import re
import sys
from typing import List, Optional

from . import demos
from .config import DEFAULT
from .errors import BoundExceededError, InvolutionEmbedError
from .etale import EtaleInvolutionAlgebra, trace_form, trace_form_signature
from .multinorm import BiquadraticDatum, multinorm_witness
from .places import Place, hilbert_symbol, place_set
from .quadform import build_form_with_invariants, globally_equivalent, invariants, locally_equivalent, similar
from .quaternion import (QuaternionAlgebra, SkewHermitianForm, bad_set_V, clifford_center,
                         disc_involution, nonsplit_global_a, quaternion_from_ramset, ram_set)
from .serialize import (ParseError, check_fields, form_from_arg, load_json_arg, parse_hasse,
                        parse_places, parse_rational, parse_rational_list, rational_json)
from .split_embedding import SplitEmbeddingProblem, global_embed

GROUPED = {"embed", "multinorm", "quat", "qf", "etale"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(message)


def _bounds(args):
    return DEFAULT.with_(witness_candidates=args.bound, checkpoint_primes=args.checkpoint_primes,
                         aux_primes=args.aux_primes, element_height=args.element_height,
                         ramset_search=args.ramset_search)


# --- subcommands -------------------------------------------------------------------------

def cmd_hilbert(args):
    a, b = parse_rational(args.a), parse_rational(args.b)
    if args.place:
        return {"symbol": hilbert_symbol(a, b, Place.parse(args.place))}
    table = {str(v): hilbert_symbol(a, b, v) for v in place_set(a, b)}
    prod = 1
    for e in table.values():
        prod *= e
    return {"symbols": table, "product": prod}


def cmd_qf_invariants(args):
    return invariants(form_from_arg(args.form)).to_json()


def cmd_qf_equiv(args):
    f, g = form_from_arg(args.f), form_from_arg(args.g)
    out = {"equivalent": globally_equivalent(f, g)}
    if f.rank == g.rank:
        places = sorted(set(f.support()) | set(g.support()))
        out["differing_places"] = [str(v) for v in places if not locally_equivalent(f, g, v)]
    return out


def cmd_qf_similar(args):
    lam = similar(form_from_arg(args.f), form_from_arg(args.g), _bounds(args))
    return {"similar": lam is not None, "lambda": None if lam is None else rational_json(lam)}


def cmd_qf_build(args):
    hasse = parse_hasse(load_json_arg(args.hasse, "hasse")) if args.hasse else {}
    sig = tuple(int(x) for x in args.signature.split(","))
    if len(sig) != 2:
        raise ParseError("signature must be p,q")
    q = build_form_with_invariants(args.rank, parse_rational(args.det), hasse, sig, _bounds(args))
    return {"form": q.to_json(), "invariants": invariants(q).to_json()}


def _etale(args) -> EtaleInvolutionAlgebra:
    return EtaleInvolutionAlgebra.from_json(load_json_arg(args.etale, "etale spec"))


def cmd_etale_trace_form(args):
    A = _etale(args)
    a = load_json_arg(args.a, "element a") if args.a else None
    q = trace_form(A, a)
    return {"form": q.to_json(), "invariants": invariants(q).to_json(),
            "signature": list(trace_form_signature(A, a))}


def cmd_embed_split(args):
    A = _etale(args)
    if args.target_diag:
        from .quadform import QuadraticForm
        q = QuadraticForm(parse_rational_list(args.target_diag))
    elif args.target:
        q = form_from_arg(args.target)
    else:
        raise ParseError("give --target-diag or --target")
    P = SplitEmbeddingProblem(q, A, extra_rational=args.extra_rational)
    return global_embed(P, _bounds(args)).to_json()


def cmd_embed_nonsplit(args):
    parts = [p.strip() for p in args.quaternion.split(",")]
    if len(parts) != 2:
        raise ParseError("--quaternion expects alpha,beta")
    D = QuaternionAlgebra(int(parts[0]), int(parts[1]))
    data = load_json_arg(args.form, "skew-hermitian form")
    check_fields(data, {"diag"}, "skew-hermitian form")
    h = SkewHermitianForm.from_json(D, data.get("diag", []))
    A = _etale(args)
    pins = load_json_arg(args.pins, "pins")
    if not isinstance(pins, dict):
        raise ParseError("pins must be an object {place: element}")
    twist = parse_places(args.twist) if args.twist else []
    Z = clifford_center(h)
    a, cert = nonsplit_global_a(D, h.m, A.factors, A.d, pins, twist, Z, _bounds(args))
    out = cert.to_json()
    out["disc"] = disc_involution(h)
    out["V"] = [str(v) for v in bad_set_V(h)]
    return out


def cmd_multinorm_biquad(args):
    B = BiquadraticDatum(args.a, args.b)
    return multinorm_witness(B, args.sample_bound, _bounds(args)).to_json()


def cmd_quat_ram(args):
    if args.ramset is not None:
        D = quaternion_from_ramset(parse_places(args.ramset), args.alpha, _bounds(args))
        return D.to_json()
    if args.alpha is None or args.beta is None:
        raise ParseError("give --alpha and --beta, or --ramset")
    return {"alpha": args.alpha, "beta": args.beta,
            "ram": [str(v) for v in ram_set(args.alpha, args.beta)]}


def cmd_demo(args):
    b = _bounds(args)
    if args.name == "example-7-5":
        return demos.example_7_5(bounds=b)
    if args.name == "example-4-6":
        return demos.example_4_6(bounds=b)
    return demos.theorem_b(args.v_size, bounds=b)


# --- parser ---------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--verbose", action="store_true", help="print the full result in human mode")
    common.add_argument("--bound", type=int, default=DEFAULT.witness_candidates,
                        help="witness search cap (default %(default)s)")
    common.add_argument("--checkpoint-primes", type=int, default=DEFAULT.checkpoint_primes)
    common.add_argument("--aux-primes", type=int, default=DEFAULT.aux_primes)
    common.add_argument("--element-height", type=int, default=DEFAULT.element_height)
    common.add_argument("--ramset-search", type=int, default=DEFAULT.ramset_search)

    p = _Parser(prog="involution-embed", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("hilbert", parents=[common], help="Hilbert symbols (a, b)_v")
    s.add_argument("--a", required=True)
    s.add_argument("--b", required=True)
    s.add_argument("--place")
    s.set_defaults(func=cmd_hilbert)

    s = sub.add_parser("qf-invariants", parents=[common], help="local invariants of a form")
    s.add_argument("--form", required=True, help="JSON {\"diag\": [...]}, a JSON file, or a,b,c")
    s.set_defaults(func=cmd_qf_invariants)

    for name, func, helptext in (("qf-equiv", cmd_qf_equiv, "global equivalence"),
                                 ("qf-similar", cmd_qf_similar, "similarity factor")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("--f", required=True)
        s.add_argument("--g", required=True)
        s.set_defaults(func=func)

    s = sub.add_parser("qf-build", parents=[common], help="form with prescribed invariants")
    s.add_argument("--rank", type=int, required=True)
    s.add_argument("--det", required=True)
    s.add_argument("--hasse", help="JSON {place: +1/-1}; missing places mean +1")
    s.add_argument("--signature", required=True, help="p,q")
    s.set_defaults(func=cmd_qf_build)

    s = sub.add_parser("etale-trace-form", parents=[common], help="trace form q_a")
    s.add_argument("--etale", required=True)
    s.add_argument("--a", help="element of F as a JSON list")
    s.set_defaults(func=cmd_etale_trace_form)

    s = sub.add_parser("embed-split", parents=[common], help="embedding into (M_n(Q), tau)")
    s.add_argument("--etale", required=True)
    s.add_argument("--target-diag")
    s.add_argument("--target")
    s.add_argument("--extra-rational", action="store_true",
                   help="the source is E x Q with the identity on Q (odd rank)")
    s.set_defaults(func=cmd_embed_split)

    s = sub.add_parser("embed-nonsplit", parents=[common], help="embedding into (M_m(D), tau)")
    s.add_argument("--quaternion", required=True, help="alpha,beta")
    s.add_argument("--form", required=True, help="skew-hermitian form {\"diag\": [[x,y,z], ...]}")
    s.add_argument("--etale", required=True)
    s.add_argument("--pins", required=True, help="JSON {place: element of F}")
    s.add_argument("--twist", help="comma-separated twist places")
    s.set_defaults(func=cmd_embed_nonsplit)

    s = sub.add_parser("multinorm-biquad", parents=[common], help="multinorm failure witness")
    s.add_argument("--a", type=int, required=True)
    s.add_argument("--b", type=int, required=True)
    s.add_argument("--sample-bound", type=int, default=1000)
    s.set_defaults(func=cmd_multinorm_biquad)

    s = sub.add_parser("quat-ram", parents=[common], help="ramification of (alpha, beta)")
    s.add_argument("--alpha", type=int)
    s.add_argument("--beta", type=int)
    s.add_argument("--ramset", help="build an algebra with this ramification instead")
    s.set_defaults(func=cmd_quat_ram)

    s = sub.add_parser("demo", parents=[common], help="worked examples")
    s.add_argument("name", choices=["example-7-5", "example-4-6", "theorem-b"])
    s.add_argument("--v-size", type=int, default=2)
    s.set_defaults(func=cmd_demo)
    return p


_NEGATIVE = re.compile(r"^-[\d.]")


def _normalize_argv(argv: List[str]) -> List[str]:
    """Accept `embed split` as well as `embed-split`, and option values such as
    `--quaternion -1,-1` that argparse would take for an option."""
    if len(argv) >= 2 and argv[0] in GROUPED and not argv[1].startswith("-"):
        argv = [f"{argv[0]}-{argv[1]}"] + argv[2:]
    out = []
    for tok in argv:
        if out and _NEGATIVE.match(tok) and out[-1].startswith("--") and "=" not in out[-1]:
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def run(argv: List[str]):
    """(exit code, JSON-able result, json flag)."""
    try:
        args = build_parser().parse_args(_normalize_argv(list(argv)))
        return 0, args.func(args), args
    except ParseError as exc:
        return 1, exc.to_json(), None
    except BoundExceededError as exc:
        return 3, exc.to_json(), None
    except InvolutionEmbedError as exc:
        return 2, exc.to_json(), None
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        return 2, {"error": "domain-error", "message": str(exc)}, None


def _human(obj, indent: int = 0) -> List[str]:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and any(isinstance(x, (dict, list)) for x in
                                                          (v.values() if isinstance(v, dict) else v)):
                lines.append(f"{pad}{k}:")
                lines += _human(v, indent + 1)
            else:
                lines.append(f"{pad}{k}: {_flat(v)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)):
                lines.append(f"{pad}-")
                lines += _human(v, indent + 1)
            else:
                lines.append(f"{pad}- {_flat(v)}")
    else:
        lines.append(pad + _flat(obj))
    return lines


def _flat(v) -> str:
    if isinstance(v, dict):
        return ", ".join(f"{k}={_flat(x)}" for k, x in v.items()) or "{}"
    if isinstance(v, list):
        return "[" + ", ".join(_flat(x) for x in v) + "]"
    if v is None:
        return "-"
    return str(v)


def main(argv: Optional[List[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    code, result, args = run(argv)
    if code != 0 or (args is not None and args.json) or "--json" in argv:
        print(json.dumps(result, indent=2, ensure_ascii=False))
    else:
        print("\n".join(_human(result)))
    return code


if __name__ == "__main__":
    sys.exit(main())
