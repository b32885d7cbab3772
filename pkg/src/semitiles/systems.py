"""Built-in substitution systems with exact coordinates, and config I/O.

Coordinates live in one cyclotomic field per system: Q(zeta_10) for the
Fibonacci and Penrose systems (it contains the golden ratio), Q(zeta_6) for
the half-hex, Q(zeta_8) for the abb/ab system (it contains sqrt 2).

The Penrose system uses the Robinson triangles with expansion -gamma (a
half-turn composed with the dilation): this is the convention under which
the forty labelled triangles substitute with the index arithmetic
phi(a_j) = {a_(j+7), b_(j+3)}, phi(b_j) = {rb_j, ra_(j+6), b_(j+4)} and the
reflected rules.  The stone-inflation identity is validated exactly.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction

from .field import FieldElement, field_make
from .geometry import Polygon, Prototile, Tile
from .substitution import SubstitutionSystem, ValidationError

_BUILTIN_CACHE: dict[str, SubstitutionSystem] = {}


def builtin(name: str) -> SubstitutionSystem:
    """A built-in system by name (cached; systems are immutable)."""
    if name not in _BUILTIN_CACHE:
        makers = {
            "fibonacci": fibonacci,
            "abb": abb_ab,
            "half-hex": half_hex,
            "penrose": penrose,
            "uncollared-fibonacci": uncollared_fibonacci,
            "double": double_letter,
        }
        if name not in makers:
            raise ValidationError(
                f"unknown builtin {name!r}; have {sorted(makers)}"
            )
        _BUILTIN_CACHE[name] = makers[name]()
    return _BUILTIN_CACHE[name]


BUILTIN_NAMES = ("fibonacci", "abb", "half-hex", "penrose",
                 "uncollared-fibonacci", "double")


def fibonacci() -> SubstitutionSystem:
    """Border-forcing Fibonacci: phi(a)=cd, phi(b)=ad, phi(c)=ad, phi(d)=b."""
    F = field_make(10)
    gamma = F.zeta(1) + F.zeta(-1)
    half = F.one / F.from_rational(2)
    iv_gamma = Polygon.interval(F.zero, gamma)
    iv_one = Polygon.interval(F.zero, F.one)
    a = Prototile(0, "a", iv_gamma, gamma * half)
    b = Prototile(1, "b", iv_gamma, gamma * half)
    c = Prototile(2, "c", iv_gamma, gamma * half)
    d = Prototile(3, "d", iv_one, half)
    rules = {
        a.index: (Tile(c, F.zero), Tile(d, gamma)),
        b.index: (Tile(a, F.zero), Tile(d, gamma)),
        c.index: (Tile(a, F.zero), Tile(d, gamma)),
        d.index: (Tile(b, F.zero),),
    }
    return SubstitutionSystem("fibonacci", F, 1, [a, b, c, d], gamma, rules)


def uncollared_fibonacci() -> SubstitutionSystem:
    """Raw Fibonacci 0 -> 01, 1 -> 0 (does not force its border)."""
    F = field_make(10)
    gamma = F.zeta(1) + F.zeta(-1)
    half = F.one / F.from_rational(2)
    t0 = Prototile(0, "0", Polygon.interval(F.zero, gamma), gamma * half)
    t1 = Prototile(1, "1", Polygon.interval(F.zero, F.one), half)
    rules = {
        t0.index: (Tile(t0, F.zero), Tile(t1, gamma)),
        t1.index: (Tile(t0, F.zero),),
    }
    return SubstitutionSystem(
        "uncollared-fibonacci", F, 1, [t0, t1], gamma, rules
    )


def abb_ab() -> SubstitutionSystem:
    """phi(a) = abb, phi(b) = ab with Perron lengths (sqrt2, 1), lambda 1+sqrt2."""
    F = field_make(8)
    s = F.zeta(1) + F.zeta(-1)  # sqrt 2
    lam = F.one + s
    half = F.one / F.from_rational(2)
    a = Prototile(0, "a", Polygon.interval(F.zero, s), s * half)
    b = Prototile(1, "b", Polygon.interval(F.zero, F.one), half)
    rules = {
        a.index: (Tile(a, F.zero), Tile(b, s), Tile(b, s + F.one)),
        b.index: (Tile(a, F.zero), Tile(b, s)),
    }
    return SubstitutionSystem("abb", F, 1, [a, b], lam, rules)


def double_letter() -> SubstitutionSystem:
    """One prototile, phi(p) = pp (periodic; used as a negative fixture)."""
    F = field_make(1)
    half = F.one / F.from_rational(2)
    p = Prototile(0, "p", Polygon.interval(F.zero, F.one), half)
    rules = {p.index: (Tile(p, F.zero), Tile(p, F.one))}
    return SubstitutionSystem(
        "double", F, 1, [p], F.from_rational(2), rules, recognisable=False
    )


def half_hex() -> SubstitutionSystem:
    """Six half-hexagons p_i (rotations by pi/3), lambda 2.

    p0 is the trapezoid with long edge from -1 to 1 and short top edge;
    its substitution holds p0 centrally with p2, p3, p4 around it.
    """
    F = field_make(6)
    z = F.zeta(1)
    third = F.one / F.from_rational(3)
    base_poly = (-F.one, F.one, z, z - F.one)
    base_punc = (z + z - F.one) * third  # (2*zeta - 1)/3, interior
    protos = []
    for i in range(6):
        rot = z ** i
        poly = Polygon(tuple(v * rot for v in base_poly))
        protos.append(Prototile(i, f"p{i}", poly, base_punc * rot))
    base_children = (
        (0, F.zero),
        (2, z + F.one),
        (3, z + z - F.one),
        (4, z - F.from_rational(2)),
    )
    rules = {}
    for i in range(6):
        rot = z ** i
        rules[i] = tuple(
            Tile(protos[(j + i) % 6], off * rot) for j, off in base_children
        )
    symmetry = {"type": "cyclic", "steps": 6, "zeta_power_per_step": 1,
                "label_shift_per_step": 1,
                "families": {"p": 6}}
    return SubstitutionSystem(
        "half-hex", F, 2, protos, F.from_rational(2), rules, symmetry=symmetry
    )


def penrose() -> SubstitutionSystem:
    """Penrose via forty labelled Robinson triangles, expansion -gamma.

    Shapes: label a_j carries the gnomon rotated by zeta^(3j); ra_j by
    zeta^(3j+7); b_j the acute triangle by zeta^(3j+3); rb_j by
    zeta^(3j+4).  With expansion -gamma the children are:
        phi(a_j)  = a_(j+7), b_(j+3)
        phi(ra_j) = ra_(j+3), rb_(j+7)
        phi(b_j)  = rb_j, ra_(j+6), b_(j+4)
        phi(rb_j) = b_j, a_(j+4), rb_(j+6)
    """
    F = field_make(10)
    z = F.zeta(1)
    gamma = z + F.zeta(-1)
    third = F.one / F.from_rational(3)
    gnomon = (F.zero, gamma, z)           # sides (gamma, 1, 1)
    acute = (F.zero, F.one, gamma * z * z)  # sides (1, gamma, gamma)

    def shape_exp(fam: str, j: int) -> int:
        return {"a": 3 * j, "ra": 3 * j + 7, "b": 3 * j + 3, "rb": 3 * j + 4}[fam] % 10

    protos = []
    index = {}
    order = [("a", j) for j in range(10)] + [("b", j) for j in range(10)] + \
            [("ra", j) for j in range(10)] + [("rb", j) for j in range(10)]
    for idx, (fam, j) in enumerate(order):
        base = gnomon if fam in ("a", "ra") else acute
        rot = z ** shape_exp(fam, j)
        poly = Polygon(tuple(v * rot for v in base))
        punc = sum(poly.vertices[1:], poly.vertices[0]) * third
        protos.append(Prototile(idx, f"{fam}{j}", poly, punc))
        index[(fam, j)] = idx

    g2 = gamma * gamma
    rules = {}
    for fam, j in order:
        s = shape_exp(fam, j)
        if fam == "a":
            kids = [("a", (j + 7) % 10, gamma * z ** ((s + 6) % 10)),
                    ("b", (j + 3) % 10, gamma * z ** ((s + 6) % 10))]
        elif fam == "ra":
            kids = [("ra", (j + 3) % 10, g2 * z ** ((s + 5) % 10)),
                    ("rb", (j + 7) % 10, gamma * z ** ((s + 5) % 10))]
        elif fam == "b":
            kids = [("rb", j, z ** ((s + 6) % 10) + z ** ((s + 7) % 10)),
                    ("ra", (j + 6) % 10, g2 * z ** ((s + 7) % 10)),
                    ("b", (j + 4) % 10, z ** ((s + 7) % 10))]
        else:
            kids = [("rb", (j + 6) % 10, gamma * z ** ((s + 5) % 10)),
                    ("a", (j + 4) % 10, gamma * z ** ((s + 6) % 10)),
                    ("b", j, gamma * z ** ((s + 6) % 10))]
        rules[index[(fam, j)]] = tuple(
            Tile(protos[index[(cf, cj)]], off) for cf, cj, off in kids
        )
    symmetry = {"type": "cyclic", "steps": 10, "zeta_power_per_step": 1,
                "label_shift_per_step": 7,
                "families": {"a": 10, "b": 10, "ra": 10, "rb": 10}}
    return SubstitutionSystem(
        "penrose", F, 2, protos, -gamma, rules, symmetry=symmetry
    )


# -- named edges and two-tile patch names ------------------------------------

_LABEL_RE = re.compile(r"^([A-Za-z]+?)(\d+)$")


def split_label(label: str):
    """'ra6' -> ('ra', 6); labels without an index return (label, None)."""
    m = _LABEL_RE.match(label)
    if m:
        return m.group(1), int(m.group(2))
    return label, None


def edge_names(system: SubstitutionSystem, proto: Prototile) -> dict[str, int]:
    """Named boundary edges of a prototile: name -> edge position (CCW).

    Half-hex: A (long bottom), then B, C, D counter-clockwise.  Penrose:
    B(ottom), R(ight), L(eft); on reflected tiles L and R swap, per the
    reflection action on edge types.
    """
    if system.name == "half-hex":
        return {"A": 0, "B": 1, "C": 2, "D": 3}
    if system.name == "penrose":
        fam, _ = split_label(proto.label)
        if fam in ("a", "b"):
            return {"B": 0, "R": 1, "L": 2}
        return {"B": 0, "L": 1, "R": 2}
    raise ValidationError(f"system {system.name!r} has no named edges")


# -- config serialization ------------------------------------------------------

def _coeffs_json(x: FieldElement) -> list[str]:
    return [
        f"{c.numerator}/{c.denominator}" if c.denominator != 1 else str(c.numerator)
        for c in x.coeffs
    ]


def system_to_json(system: SubstitutionSystem) -> dict:
    protos = []
    for p in system.prototiles:
        protos.append({
            "label": p.label,
            "vertices": [_coeffs_json(v) for v in p.polygon.vertices],
            "puncture": _coeffs_json(p.puncture),
        })
    rules = {}
    for p in system.prototiles:
        rules[p.label] = [
            {"prototile": t.proto.label, "offset": _coeffs_json(t.offset)}
            for t in system.rule(p)
        ]
    doc = {
        "schema": "semitiles-system@1",
        "name": system.name,
        "conductor": system.field.conductor,
        "dimension": system.dim,
        "convention": system.convention,
        "recognisable": system.recognisable,
        "lambda": _coeffs_json(system.lam),
        "prototiles": protos,
        "rules": rules,
    }
    if system.symmetry:
        doc["symmetry"] = system.symmetry
    return doc


def system_from_json(doc: dict) -> SubstitutionSystem:
    if doc.get("schema") != "semitiles-system@1":
        raise ValidationError("not a semitiles system document")
    F = field_make(int(doc["conductor"]))
    dim = int(doc["dimension"])

    def elem(coeffs) -> FieldElement:
        return F.element([Fraction(c) for c in coeffs])

    lam = elem(doc["lambda"])
    symmetry = doc.get("symmetry")
    z = F.zeta(1)

    explicit = {}
    orbit_entries = []
    labels_in_order = []
    for entry in doc["prototiles"]:
        labels_in_order.append(entry["label"])
        if "orbit_of" in entry:
            orbit_entries.append(entry)
        else:
            explicit[entry["label"]] = entry

    geom: dict[str, tuple[tuple[FieldElement, ...], FieldElement]] = {}
    for label, entry in explicit.items():
        geom[label] = (
            tuple(elem(v) for v in entry["vertices"]),
            elem(entry["puncture"]),
        )
    for entry in orbit_entries:
        base = entry["orbit_of"]
        if base not in geom:
            raise ValidationError(f"orbit base {base!r} not defined")
        rot = z ** int(entry.get("rotate", 0))
        verts, punc = geom[base]
        geom[entry["label"]] = (tuple(v * rot for v in verts), punc * rot)

    protos = []
    by_label = {}
    for idx, label in enumerate(labels_in_order):
        verts, punc = geom[label]
        p = Prototile(idx, label, Polygon(verts, dim=dim), punc)
        protos.append(p)
        by_label[label] = p

    rules_doc = dict(doc.get("rules", {}))
    rules = {}

    def parse_rule(label):
        items = rules_doc[label]
        return tuple(
            Tile(by_label[it["prototile"]], elem(it["offset"])) for it in items
        )

    for label in rules_doc:
        rules[by_label[label].index] = parse_rule(label)

    # Expand missing rules by rotational equivariance, when declared.
    if symmetry and symmetry.get("type") == "cyclic":
        steps = int(symmetry["steps"])
        zp = int(symmetry["zeta_power_per_step"])
        shift = int(symmetry["label_shift_per_step"])
        families = symmetry["families"]

        def shift_label(label: str, k: int) -> str:
            fam, idx = split_label(label)
            if fam not in families or idx is None:
                raise ValidationError(f"label {label!r} not in a symmetry family")
            return f"{fam}{(idx + shift * k) % families[fam]}"

        for p in protos:
            if p.index in rules:
                continue
            fam, idx = split_label(p.label)
            if fam not in families or idx is None:
                raise ValidationError(f"no rule for prototile {p.label!r}")
            base_label = f"{fam}0"
            base_proto = by_label[base_label]
            if base_proto.index not in rules:
                raise ValidationError(f"no rule for orbit base {base_label!r}")
            # p = theta^k(base) requires idx = shift*k mod steps.
            k = next(
                (k for k in range(steps) if (shift * k) % families[fam] == idx),
                None,
            )
            if k is None:
                raise ValidationError(f"cannot reach {p.label!r} by symmetry")
            rot = z ** (zp * k)
            rules[p.index] = tuple(
                Tile(by_label[shift_label(t.proto.label, k)], t.offset * rot)
                for t in rules[base_proto.index]
            )

    missing = [p.label for p in protos if p.index not in rules]
    if missing:
        raise ValidationError(f"missing rules for prototiles {missing}")

    return SubstitutionSystem(
        doc.get("name", "unnamed"), F, dim, protos, lam, rules,
        convention=doc.get("convention", "adjacent"),
        recognisable=bool(doc.get("recognisable", True)),
        symmetry=symmetry,
    )


def load_system(path: str) -> SubstitutionSystem:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(
                f"config parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
            ) from None
    return system_from_json(doc)


def save_system(system: SubstitutionSystem, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(system_to_json(system), fh, indent=1, sort_keys=True)
        fh.write("\n")
