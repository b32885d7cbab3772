"""Substitution systems: stone inflations, supertiles, and the extension graph.

A system owns its prototiles, the inflation factor, and the subdivision rule.
Validation covers the stone-inflation identity (exactly, by containment,
pairwise disjointness and total measure), primitivity, FLC saturation of
two-tile patches, border forcing, and a recognisability sanity check.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .field import CyclotomicField, FieldElement, fast_approx, field_make
from .geometry import (
    GeometryError,
    OverlapError,
    Patch,
    Polygon,
    Prototile,
    Tile,
    _bbox_touch,
    patch_canonical,
    segments_intersect_closed,
    tiles_meet,
)


class ValidationError(ValueError):
    pass


class FLCError(ValidationError):
    """Two-tile saturation exceeded its cap: not FLC-certified."""


class SupertileExtension:
    """One child tile inside one substituted prototile: an edge (r, s).

    r is the child's prototile, s the parent; position indexes the child in
    the parent's rule, and offset is the child's exact placement inside the
    inflated parent.
    """

    __slots__ = ("parent", "position", "child", "offset", "label", "_dup")

    def __init__(self, parent: Prototile, position: int, child: Prototile,
                 offset: FieldElement, duplicated: bool):
        self.parent = parent
        self.position = position
        self.child = child
        self.offset = offset
        self._dup = duplicated
        if duplicated:
            self.label = f"({child.label}@{position + 1},{parent.label})"
        else:
            self.label = f"({child.label},{parent.label})"

    @property
    def r(self) -> Prototile:
        return self.child

    @property
    def s(self) -> Prototile:
        return self.parent

    def ident(self):
        return (self.parent.index, self.position)

    def __eq__(self, other):
        if not isinstance(other, SupertileExtension):
            return NotImplemented
        return self.ident() == other.ident()

    def __hash__(self):
        return hash(("ext",) + self.ident())

    def __repr__(self):
        return self.label


class SubstitutionGraph:
    """Vertices are prototiles, edges the supertile extensions."""

    def __init__(self, system: "SubstitutionSystem"):
        self.system = system
        self.vertices = system.prototiles
        edges = []
        for p in system.prototiles:
            children = system.rule(p)
            counts = {}
            for t in children:
                counts[t.proto.index] = counts.get(t.proto.index, 0) + 1
            for pos, t in enumerate(children):
                edges.append(
                    SupertileExtension(
                        p, pos, t.proto, t.offset, counts[t.proto.index] > 1
                    )
                )
        self.edges = tuple(edges)
        self.by_range = {p.index: [] for p in self.vertices}
        self.by_source = {p.index: [] for p in self.vertices}
        for e in self.edges:
            self.by_range[e.child.index].append(e)
            self.by_source[e.parent.index].append(e)
        self._by_label = {e.label: e for e in self.edges}

    def edge_by_label(self, label: str) -> SupertileExtension:
        try:
            return self._by_label[label]
        except KeyError:
            raise ValidationError(f"unknown supertile extension {label!r}") from None

    def edge_labels(self) -> list[str]:
        return sorted(e.label for e in self.edges)

    def __repr__(self):
        return f"SubstitutionGraph({len(self.vertices)} vertices, {len(self.edges)} edges)"


class SubstitutionSystem:
    """A validated substitution tiling system over a cyclotomic field."""

    def __init__(self, name: str, field: CyclotomicField, dim: int,
                 prototiles: list[Prototile], lam: FieldElement,
                 rules: dict[int, tuple[Tile, ...]], convention: str = "adjacent",
                 recognisable: bool = True, symmetry: dict | None = None):
        self.name = name
        self.field = field
        self.dim = dim
        self.prototiles = tuple(prototiles)
        self.lam = lam
        self._rules = {k: tuple(v) for k, v in rules.items()}
        self.convention = convention
        self.recognisable = recognisable
        self.symmetry = symmetry
        self.by_label = {p.label: p for p in self.prototiles}
        if len(self.by_label) != len(self.prototiles):
            raise ValidationError("duplicate prototile labels")
        self._graph = None
        self._supertiles: dict[tuple[int, int], Patch] = {}
        self._parent_maps: dict[tuple[int, int], dict] = {}
        self._legal_pairs = None
        self._forcing_index = None
        self._coronas: dict[tuple[int, int], Patch] = {}
        self._star_patches = None

    # -- core structure ------------------------------------------------------

    def proto(self, label: str) -> Prototile:
        try:
            return self.by_label[label]
        except KeyError:
            raise ValidationError(f"unknown prototile {label!r}") from None

    def rule(self, p: Prototile) -> tuple[Tile, ...]:
        return self._rules[p.index]

    @property
    def graph(self) -> SubstitutionGraph:
        if self._graph is None:
            self._graph = SubstitutionGraph(self)
        return self._graph

    def substitute(self, t: Tile) -> Patch:
        """Inflate and subdivide one tile: phi(p + x) = phi(p) + lambda x."""
        if t.proto.index not in self._rules:
            raise ValidationError(f"unknown prototile id {t.proto.index}")
        shift = self.lam * t.offset
        return Patch(
            (Tile(c.proto, c.offset + shift) for c in self._rules[t.proto.index]),
            self.convention,
            validate=False,
        )

    def substitute_patch(self, patch: Patch) -> Patch:
        tiles = []
        for t in patch.tiles:
            shift = self.lam * t.offset
            tiles.extend(
                Tile(c.proto, c.offset + shift) for c in self._rules[t.proto.index]
            )
        return Patch(tiles, self.convention, validate=False)

    def supertile(self, p: Prototile, n: int) -> Patch:
        """phi^n(p) for the tile p at the origin (standard frame)."""
        key = (p.index, n)
        got = self._supertiles.get(key)
        if got is None:
            if n == 0:
                got = Patch([Tile(p, self.field.zero)], self.convention, validate=False)
            else:
                got = self.substitute_patch(self.supertile(p, n - 1))
            self._supertiles[key] = got
        return got

    def supertile_support(self, p: Prototile, n: int) -> Polygon:
        return p.polygon.scale(self.lam ** n)

    def parent_map(self, p: Prototile, n: int) -> dict:
        """For tiles of supertile(p, n): tile ident -> (parent tile, position).

        Parents are tiles of supertile(p, n-1); positions index the rule of
        the parent's prototile.
        """
        key = (p.index, n)
        got = self._parent_maps.get(key)
        if got is None:
            if n == 0:
                raise ValidationError("level-0 supertile has no parents")
            got = {}
            for u in self.supertile(p, n - 1).tiles:
                shift = self.lam * u.offset
                for pos, c in enumerate(self._rules[u.proto.index]):
                    got[(c.proto.index, c.offset + shift)] = (u, pos)
            self._parent_maps[key] = got
        return got

    # -- validation checks -----------------------------------------------------

    def check_stone_inflation(self) -> list[str]:
        """Exact support identity supp(phi(p)) = lambda supp(p) for all p."""
        failures = []
        for p in self.prototiles:
            inflated = p.polygon.scale(self.lam)
            children = self._rules.get(p.index)
            if not children:
                failures.append(f"{p.label}: no rule")
                continue
            total = None
            ok = True
            for t in children:
                if not inflated.contains_polygon(t.support):
                    failures.append(
                        f"{p.label}: child {t.proto.label} not inside inflated support"
                    )
                    ok = False
                m = t.support.measure_form()
                total = m if total is None else total + m
            for i in range(len(children)):
                for j in range(i + 1, len(children)):
                    si, sj = children[i].support, children[j].support
                    if _bbox_touch(si.bbox(), sj.bbox()) and si.interiors_intersect(sj):
                        failures.append(
                            f"{p.label}: children {i} and {j} overlap"
                        )
                        ok = False
            if ok and total != inflated.measure_form():
                failures.append(f"{p.label}: children do not fill the inflated support")
        return failures

    def incidence_matrix(self) -> list[list[int]]:
        """M[r][s] = number of r-children in rule(s)."""
        n = len(self.prototiles)
        M = [[0] * n for _ in range(n)]
        for p in self.prototiles:
            for t in self._rules[p.index]:
                M[t.proto.index][p.index] += 1
        return M

    def check_primitive(self, k_max: int = 12) -> tuple[bool, int | None]:
        n = len(self.prototiles)
        M = self.incidence_matrix()
        P = [row[:] for row in M]
        for k in range(1, k_max + 1):
            if k > 1:
                P = [
                    [sum(P[i][t] * M[t][j] for t in range(n)) for j in range(n)]
                    for i in range(n)
                ]
            if all(P[i][j] > 0 for i in range(n) for j in range(n)):
                return True, k
        return False, None

    def legal_pair_patches(self, cap: int = 4096) -> frozenset[Patch]:
        """All two-tile patch classes generated under iteration (saturation)."""
        if self._legal_pairs is not None:
            return self._legal_pairs
        found: dict[Patch, None] = {}
        queue = []

        def note(t1: Tile, t2: Tile):
            pair = Patch((t1, t2), self.convention, validate=False)
            pair = patch_canonical(pair)[0]
            if pair not in found:
                if len(found) >= cap:
                    raise FLCError(f"two-tile saturation exceeded cap {cap}")
                found[pair] = None
                queue.append(pair)

        for p in self.prototiles:
            children = self._rules[p.index]
            for i in range(len(children)):
                for j in range(i + 1, len(children)):
                    a, b = children[i], children[j]
                    if _bbox_touch(a.support.bbox(), b.support.bbox()) and tiles_meet(
                        a, b, self.convention
                    ):
                        note(a, b)
        while queue:
            pair = queue.pop()
            t1, t2 = pair.tiles
            c1 = self.substitute(t1).tiles
            c2 = self.substitute(t2).tiles
            for a in c1:
                for b in c2:
                    if _bbox_touch(a.support.bbox(), b.support.bbox()) and tiles_meet(
                        a, b, self.convention
                    ):
                        note(a, b)
        self._legal_pairs = frozenset(found)
        return self._legal_pairs

    def _occurrences(self, p: Prototile, k: int, m: int):
        """Embeddings of supertile(p,k) into supertile(q, k+m) via length-m
        ascending paths; yields (big patch, big support, frame offset)."""
        graph = self.graph
        lam = self.lam

        def walk(proto, depth, offset):
            if depth == m:
                yield proto, offset
                return
            for e in graph.by_range[proto.index]:
                yield from walk(e.parent, depth + 1,
                                offset + self.lam ** (k + depth) * e.offset)

        for q, off in walk(p, 0, self.field.zero):
            big = self.supertile(q, k + m)
            yield big, self.supertile_support(q, k + m), off

    def _strictly_inside(self, inner: Polygon, outer: Polygon) -> bool:
        if inner.dim == 1:
            from .geometry import sign_real

            lo_o, hi_o = outer.vertices
            lo_i, hi_i = inner.vertices
            return sign_real(lo_i - lo_o) > 0 and sign_real(hi_o - hi_i) > 0
        if not outer.contains_polygon(inner):
            return False
        for a, b in inner.edges():
            for c, d in outer.edges():
                if segments_intersect_closed(a, b, c, d):
                    return False
        return True

    def _corona_signatures(self, p: Prototile, k: int, m: int):
        """Distinct relative corona signatures over complete occurrences."""
        base = self.supertile(p, k)
        member_count = len(base)
        signatures = set()
        for big, big_support, off in self._occurrences(p, k, m):
            embedded = self.supertile_support(p, k).translate(off)
            if not self._strictly_inside(embedded, big_support):
                continue
            members = {(t.proto.index, t.offset + off) for t in base.tiles}
            corona = []
            for t in big.tiles_touching(embedded):
                if (t.proto.index, t.offset) not in members:
                    corona.append((t.proto.index, t.offset - off))
            signatures.add(frozenset(corona))
        return signatures

    def border_forcing_index(self, k_max: int = 8, levels_up: int = 3) -> int | None:
        """Least k such that every k-supertile has a unique 1-corona."""
        if self._forcing_index is not None:
            return self._forcing_index if self._forcing_index > 0 else None
        for k in range(1, k_max + 1):
            ok = True
            for p in self.prototiles:
                m = levels_up
                sigs = self._corona_signatures(p, k, m)
                while not sigs and m < levels_up + 3:
                    m += 1
                    sigs = self._corona_signatures(p, k, m)
                if len(sigs) != 1:
                    ok = False
                    break
            if ok:
                self._forcing_index = k
                return k
        self._forcing_index = 0
        return None

    def forced_corona(self, p: Prototile, k: int, levels_up: int = 3) -> Patch:
        """phi^k(p) together with its unique surrounding tiles (standard frame)."""
        idx = self.border_forcing_index()
        if idx is None or k < idx:
            raise ValidationError(
                f"corona not forced at level {k} (forcing index {idx})"
            )
        key = (p.index, k)
        got = self._coronas.get(key)
        if got is None:
            m = levels_up
            sigs = self._corona_signatures(p, k, m)
            while not sigs and m < levels_up + 3:
                m += 1
                sigs = self._corona_signatures(p, k, m)
            if len(sigs) != 1:
                raise ValidationError(
                    f"corona of {p.label} at level {k} is not unique"
                )
            (sig,) = sigs
            tiles = list(self.supertile(p, k).tiles)
            for proto_idx, off in sig:
                tiles.append(Tile(self.prototiles[proto_idx], off))
            got = Patch(tiles, self.convention, validate=False)
            self._coronas[key] = got
        return got

    def recognisability_check(self, n_max: int = 4) -> list[str]:
        """Desk-scale sanity: no phi^n(p) agrees with a nontrivial translate
        of itself on most of the overlap (a local periodicity red flag).

        An irrational inflation factor already rules out periodicity, so the
        overlap scan only runs for rational lambda.
        """
        if not self.lam.is_rational():
            return []
        warnings = []
        for p in self.prototiles:
            patch = self.supertile(p, n_max)
            tiles_by_ident = {t.ident() for t in patch.tiles}
            support = self.supertile_support(p, n_max)
            sb = support.bbox()
            offsets = {}
            for t in patch.tiles:
                offsets.setdefault(t.proto.index, []).append(t.offset)
            seen = set()
            for idx, offs in offsets.items():
                for i in range(len(offs)):
                    for j in range(len(offs)):
                        if i == j:
                            continue
                        v = offs[j] - offs[i]
                        if v in seen:
                            continue
                        seen.add(v)
                        inside = 0
                        agree = True
                        for t in patch.tiles:
                            if (t.proto.index, t.offset + v) in tiles_by_ident:
                                inside += 1  # shifted copy present in the patch
                                continue
                            tb = t.support.bbox()
                            # Cheap reject: shifted bbox well outside support.
                            dv = fast_approx(v)
                            if (
                                tb[0] + dv.real > sb[0] - 1e-6
                                and tb[1] + dv.imag > sb[1] - 1e-6
                                and tb[2] + dv.real < sb[2] + 1e-6
                                and tb[3] + dv.imag < sb[3] + 1e-6
                            ) and support.contains_polygon(t.support.translate(v)):
                                agree = False
                                break
                        if agree and inside >= max(2, int(0.9 * len(patch))):
                            warnings.append(
                                f"{p.label}: phi^{n_max} agrees with a nontrivial translate"
                            )
        return warnings

    def validate(self, k_max_primitive: int = 12, k_max_forcing: int = 8,
                 flc_cap: int = 4096) -> "ValidationReport":
        checks = {}
        failures = self.check_stone_inflation()
        checks["stone-inflation"] = (not failures, failures)
        primitive, k = self.check_primitive(k_max_primitive)
        checks["primitivity"] = (primitive, [f"k={k}"] if primitive else ["not primitive"])
        try:
            pairs = self.legal_pair_patches(flc_cap)
            checks["flc-saturation"] = (True, [f"{len(pairs)} two-tile classes"])
        except FLCError as exc:
            checks["flc-saturation"] = (False, [str(exc)])
        if checks["stone-inflation"][0] and checks["flc-saturation"][0]:
            idx = self.border_forcing_index(k_max_forcing)
            checks["border-forcing"] = (idx is not None,
                                        [f"index={idx}"] if idx else ["not forced"])
        else:
            checks["border-forcing"] = (False, ["skipped: earlier failures"])
        warnings = self.recognisability_check() if checks["stone-inflation"][0] else []
        checks["recognisability-sanity"] = (not warnings, warnings)
        edges = len(self.graph.edges) if checks["stone-inflation"][0] else 0
        return ValidationReport(self.name, checks, edges)


class ValidationReport:
    def __init__(self, name: str, checks: dict, graph_edges: int):
        self.name = name
        self.checks = checks
        self.graph_edges = graph_edges

    @property
    def ok(self) -> bool:
        return all(passed for passed, _ in self.checks.values())

    def lines(self) -> list[str]:
        out = [f"system: {self.name}"]
        for check, (passed, notes) in self.checks.items():
            status = "pass" if passed else "FAIL"
            detail = f" ({'; '.join(notes)})" if notes else ""
            out.append(f"  {check}: {status}{detail}")
        out.append(f"  supertile extensions: {self.graph_edges}")
        return out

    def __repr__(self):
        return "\n".join(self.lines())
