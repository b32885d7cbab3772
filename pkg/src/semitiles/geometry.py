"""Exact planar and 1-dimensional geometry of tiles and patches.

Coordinates are cyclotomic field elements; the plane is identified with the
complex embedding.  Every predicate is exact: float bounding boxes are used
only as a conservative prefilter (margin far above accumulated float error),
with all near cases decided by certified field signs.
"""

from __future__ import annotations

from fractions import Fraction

from .field import FieldElement, fast_approx

# Coordinates in this system stay modest (|z| < 1e6); float error after a
# handful of operations stays below ~1e-9, so a 1e-6 margin is conservative.
_MARGIN = 1e-6


class GeometryError(ValueError):
    pass


class OverlapError(GeometryError):
    """Raised when tile interiors overlap in an invalid configuration."""


# -- exact sign helpers with float prefilter --------------------------------


def sign_real(z: FieldElement) -> int:
    v = fast_approx(z).real
    if v > _MARGIN:
        return 1
    if v < -_MARGIN:
        return -1
    return z.sign("real")


def sign_imag(z: FieldElement) -> int:
    v = fast_approx(z).imag
    if v > _MARGIN:
        return 1
    if v < -_MARGIN:
        return -1
    return z.sign("imag")


def cmp_points(a: FieldElement, b: FieldElement) -> int:
    """Exact lexicographic comparison: real part first, then imaginary."""
    s = _cmp_re(a, b)
    if s:
        return s
    return _cmp_im(a, b)


def cross2i(u: FieldElement, v: FieldElement) -> FieldElement:
    # conj(u)*v - u*conj(v) = 2i * (u x v); sign of the cross product is
    # the imaginary sign of this element.
    return u.conjugate() * v - u * v.conjugate()


def dot2(u: FieldElement, v: FieldElement) -> FieldElement:
    # conj(u)*v + u*conj(v) = 2 * (u . v), a real field element.
    return u.conjugate() * v + u * v.conjugate()


def orient(a: FieldElement, b: FieldElement, c: FieldElement) -> int:
    # Float prefilter on the raw cross product; exact sign when inconclusive.
    fa, fb, fc = fast_approx(a), fast_approx(b), fast_approx(c)
    cr = (fb.real - fa.real) * (fc.imag - fa.imag) - (fb.imag - fa.imag) * (
        fc.real - fa.real
    )
    if cr > _MARGIN:
        return 1
    if cr < -_MARGIN:
        return -1
    return cross2i(b - a, c - a).sign("imag")


def _cmp_re(a: FieldElement, b: FieldElement) -> int:
    d = fast_approx(a).real - fast_approx(b).real
    if d > _MARGIN:
        return 1
    if d < -_MARGIN:
        return -1
    return (a - b).sign("real")


def _cmp_im(a: FieldElement, b: FieldElement) -> int:
    d = fast_approx(a).imag - fast_approx(b).imag
    if d > _MARGIN:
        return 1
    if d < -_MARGIN:
        return -1
    return (a - b).sign("imag")


def sq_dist(a: FieldElement, b: FieldElement) -> FieldElement:
    d = a - b
    return d * d.conjugate()


# -- segments ----------------------------------------------------------------


def on_segment(p, a, b) -> bool:
    """p lies on the closed segment [a, b]."""
    # Float prefilter: distance from the segment's bounding box.
    fp, fa, fb = fast_approx(p), fast_approx(a), fast_approx(b)
    if (
        fp.real < min(fa.real, fb.real) - _MARGIN
        or fp.real > max(fa.real, fb.real) + _MARGIN
        or fp.imag < min(fa.imag, fb.imag) - _MARGIN
        or fp.imag > max(fa.imag, fb.imag) + _MARGIN
    ):
        return False
    if orient(a, b, p) != 0:
        return False
    t = dot2(p - a, b - a)
    if sign_real(t) < 0:
        return False
    return sign_real(dot2(b - a, b - a) - t) >= 0


def segments_cross_transversal(a, b, c, d) -> bool:
    """Open segments cross at a single interior point of both."""
    o1, o2 = orient(a, b, c), orient(a, b, d)
    o3, o4 = orient(c, d, a), orient(c, d, b)
    return o1 * o2 < 0 and o3 * o4 < 0


def segments_intersect_closed(a, b, c, d) -> bool:
    if segments_cross_transversal(a, b, c, d):
        return True
    return (
        on_segment(c, a, b)
        or on_segment(d, a, b)
        or on_segment(a, c, d)
        or on_segment(b, c, d)
    )


def collinear_overlap_positive(a, b, c, d) -> bool:
    """Segments are collinear and overlap in a positive-length segment."""
    if orient(a, b, c) != 0 or orient(a, b, d) != 0:
        return False
    u = b - a
    den = dot2(u, u)
    tc, td = dot2(c - a, u), dot2(d - a, u)
    lo, hi = (tc, td) if sign_real(td - tc) >= 0 else (td, tc)
    # Overlap of [0, den] and [lo, hi] has positive length.
    start = lo if sign_real(lo) > 0 else den.field.zero
    end = hi if sign_real(hi - den) < 0 else den
    return sign_real(end - start) > 0


def transversal_point(a, b, c, d) -> FieldElement:
    """Intersection point of properly crossing segments."""
    num = cross2i(c - a, d - c)
    den = cross2i(b - a, d - c)
    t = num / den  # ratio of purely imaginary elements: real
    return a + t * (b - a)


def segment_param(p, a, b) -> FieldElement:
    """Parameter t with p = a + t (b - a); p must be on the line a-b."""
    return (p - a) / (b - a)


# -- polygons ----------------------------------------------------------------


class Polygon:
    """A simple positively oriented polygon (dim 2) or interval (dim 1)."""

    __slots__ = ("dim", "vertices", "_bbox", "_interior")

    def __init__(self, vertices, dim: int = 2, validate: bool = True):
        self.dim = dim
        self.vertices = tuple(vertices)
        self._bbox = None
        self._interior = None
        if validate:
            self._validate()

    @staticmethod
    def interval(lo: FieldElement, hi: FieldElement, validate: bool = True) -> "Polygon":
        return Polygon((lo, hi), dim=1, validate=validate)

    def _validate(self):
        if self.dim == 1:
            lo, hi = self.vertices
            if not lo.imag_is_zero() or not hi.imag_is_zero():
                raise GeometryError("1-d endpoints must be real")
            if sign_real(hi - lo) <= 0:
                raise GeometryError("empty interval")
            return
        n = len(self.vertices)
        if n < 3:
            raise GeometryError("polygon needs at least 3 vertices")
        if len(set(self.vertices)) != n:
            raise GeometryError("repeated vertex")
        for a, b in self.edges():
            if a == b:
                raise GeometryError("zero-length edge")
        # Positively oriented (signed area > 0).
        if sign_imag(self._area_form()) <= 0:
            raise GeometryError("polygon must be counter-clockwise")
        # Simple: non-adjacent edges may not touch, adjacent ones only at
        # the shared vertex.
        edges = list(self.edges())
        for i in range(n):
            a, b = edges[i]
            for j in range(i + 1, n):
                c, d = edges[j]
                adjacent = j == i + 1 or (i == 0 and j == n - 1)
                if adjacent:
                    shared = b if j == i + 1 else a
                    other = (c, d)
                    for p in other:
                        if p != shared and on_segment(p, a, b):
                            raise GeometryError("self-touching polygon")
                    if segments_cross_transversal(a, b, c, d):
                        raise GeometryError("self-intersecting polygon")
                elif segments_intersect_closed(a, b, c, d):
                    raise GeometryError("self-intersecting polygon")

    def edges(self):
        if self.dim == 1:
            yield self.vertices
            return
        n = len(self.vertices)
        for i in range(n):
            yield self.vertices[i], self.vertices[(i + 1) % n]

    def _area_form(self) -> FieldElement:
        # Sum of cross2i over the boundary: 4i * area.
        total = None
        for a, b in self.edges():
            term = cross2i(a, b)
            total = term if total is None else total + term
        return total

    def measure_form(self) -> FieldElement:
        """Field element encoding the d-volume (comparable exactly)."""
        if self.dim == 1:
            return self.vertices[1] - self.vertices[0]
        return self._area_form()

    def translate(self, v: FieldElement) -> "Polygon":
        return Polygon(tuple(p + v for p in self.vertices), self.dim, validate=False)

    def scale(self, s: FieldElement) -> "Polygon":
        return Polygon(tuple(p * s for p in self.vertices), self.dim, validate=False)

    def bbox(self):
        if self._bbox is None:
            pts = [fast_approx(p) for p in self.vertices]
            self._bbox = (
                min(p.real for p in pts),
                min(p.imag for p in pts),
                max(p.real for p in pts),
                max(p.imag for p in pts),
            )
        return self._bbox

    def contains_point(self, p: FieldElement) -> int:
        """1 strictly inside, 0 on the boundary, -1 outside."""
        if self.dim == 1:
            lo, hi = self.vertices
            s_lo = sign_real(p - lo)
            s_hi = sign_real(hi - p)
            if s_lo < 0 or s_hi < 0 or not p.imag_is_zero():
                return -1
            return 0 if (s_lo == 0 or s_hi == 0) else 1
        x, y = fast_approx(p).real, fast_approx(p).imag
        bx0, by0, bx1, by1 = self.bbox()
        if x < bx0 - _MARGIN or x > bx1 + _MARGIN or y < by0 - _MARGIN or y > by1 + _MARGIN:
            return -1
        for a, b in self.edges():
            if on_segment(p, a, b):
                return 0
        inside = False
        for a, b in self.edges():
            sa = _cmp_im(a, p)
            sb = _cmp_im(b, p)
            if sa <= 0 < sb:
                if orient(a, b, p) > 0:
                    inside = not inside
            elif sb <= 0 < sa:
                if orient(a, b, p) < 0:
                    inside = not inside
        return 1 if inside else -1

    def interior_point(self) -> FieldElement:
        """A representative point strictly inside (exact)."""
        if self._interior is not None:
            return self._interior
        if self.dim == 1:
            lo, hi = self.vertices
            self._interior = (lo + hi) / lo.field.from_rational(2)
            return self._interior
        field = self.vertices[0].field
        centroid = sum(self.vertices[1:], self.vertices[0]) / field.from_rational(
            len(self.vertices)
        )
        if self.contains_point(centroid) == 1:
            self._interior = centroid
            return centroid
        # Ear clipping: centroid of the first valid ear.
        verts = list(self.vertices)
        n = len(verts)
        for i in range(n):
            a, b, c = verts[i - 1], verts[i], verts[(i + 1) % n]
            if orient(a, b, c) <= 0:
                continue
            ear = Polygon((a, b, c), validate=False)
            if any(
                ear.contains_point(v) >= 0
                for j, v in enumerate(verts)
                if v not in (a, b, c)
            ):
                continue
            self._interior = (a + b + c) / field.from_rational(3)
            return self._interior
        raise GeometryError("no ear found; polygon invalid")

    def _boundary_split_params(self, a, b, other: "Polygon"):
        """Sorted params in (0,1) where [a,b] touches other's boundary."""
        params = []
        seg = b - a
        den = dot2(seg, seg)
        for c, d in other.edges():
            if segments_cross_transversal(a, b, c, d):
                p = transversal_point(a, b, c, d)
                params.append(segment_param(p, a, b))
                continue
            for q in (c, d):
                if q != a and q != b and on_segment(q, a, b):
                    params.append(dot2(q - a, seg) / den)
        out = []
        seen = set()
        for t in params:
            if t not in seen:
                seen.add(t)
                out.append(t)
        out.sort(key=lambda t: t.coeffs)
        return out

    def interiors_intersect(self, other: "Polygon") -> bool:
        """Exact test: do the open interiors meet?"""
        if self.dim != other.dim:
            raise GeometryError("dimension mismatch")
        if not _bbox_touch(self.bbox(), other.bbox()):
            return False
        if self.dim == 1:
            lo1, hi1 = self.vertices
            lo2, hi2 = other.vertices
            lo = lo1 if sign_real(lo1 - lo2) >= 0 else lo2
            hi = hi1 if sign_real(hi1 - hi2) <= 0 else hi2
            return sign_real(hi - lo) > 0
        one = self.vertices[0].field.one
        half = one / one.field.from_rational(2)
        for poly, ambient in ((self, other), (other, self)):
            for a, b in poly.edges():
                ts = poly._boundary_split_params(a, b, ambient)
                bounds = [poly.vertices[0].field.zero] + ts + [one]
                for t1, t2 in zip(bounds, bounds[1:]):
                    mid = a + ((t1 + t2) * half) * (b - a)
                    if ambient.contains_point(mid) == 1:
                        return True
        if other.contains_point(self.interior_point()) == 1:
            return True
        if self.contains_point(other.interior_point()) == 1:
            return True
        return False

    def contains_polygon(self, inner: "Polygon") -> bool:
        """Closed containment: inner subset of the closure of self."""
        if self.dim != inner.dim:
            raise GeometryError("dimension mismatch")
        if self.dim == 1:
            lo1, hi1 = self.vertices
            lo2, hi2 = inner.vertices
            return sign_real(lo2 - lo1) >= 0 and sign_real(hi1 - hi2) >= 0
        one = self.vertices[0].field.one
        half = one / one.field.from_rational(2)
        for v in inner.vertices:
            if self.contains_point(v) < 0:
                return False
        for a, b in inner.edges():
            ts = inner._boundary_split_params(a, b, self)
            bounds = [a.field.zero] + ts + [one]
            for t1, t2 in zip(bounds, bounds[1:]):
                mid = a + ((t1 + t2) * half) * (b - a)
                if self.contains_point(mid) < 0:
                    return False
        return True

    def supports_intersect(self, other: "Polygon") -> bool:
        """Closed supports share at least one point."""
        if not _bbox_touch(self.bbox(), other.bbox()):
            return False
        if self.dim == 1:
            lo1, hi1 = self.vertices
            lo2, hi2 = other.vertices
            lo = lo1 if sign_real(lo1 - lo2) >= 0 else lo2
            hi = hi1 if sign_real(hi1 - hi2) <= 0 else hi2
            return sign_real(hi - lo) >= 0
        for a, b in self.edges():
            for c, d in other.edges():
                if segments_intersect_closed(a, b, c, d):
                    return True
        return (
            other.contains_point(self.vertices[0]) >= 0
            or self.contains_point(other.vertices[0]) >= 0
        )

    def __eq__(self, other):
        if not isinstance(other, Polygon):
            return NotImplemented
        return self.dim == other.dim and self.vertices == other.vertices

    def __hash__(self):
        return hash((self.dim, self.vertices))

    def __repr__(self):
        pts = ", ".join(f"{fast_approx(v):.4g}" for v in self.vertices)
        return f"Polygon[{pts}]"


def _bbox_touch(b1, b2) -> bool:
    return not (
        b1[2] < b2[0] - _MARGIN
        or b2[2] < b1[0] - _MARGIN
        or b1[3] < b2[1] - _MARGIN
        or b2[3] < b1[1] - _MARGIN
    )


# -- prototiles, tiles, patches ----------------------------------------------


class Prototile:
    """A labelled polygon with a marked interior puncture."""

    __slots__ = ("index", "label", "polygon", "puncture")

    def __init__(self, index: int, label: str, polygon: Polygon, puncture: FieldElement):
        if polygon.contains_point(puncture) != 1:
            raise GeometryError(f"puncture of {label!r} not interior")
        self.index = index
        self.label = label
        self.polygon = polygon
        self.puncture = puncture

    def __repr__(self):
        return f"Prototile({self.label})"

    def __eq__(self, other):
        return self is other

    def __hash__(self):
        return hash((id(type(self)), self.index, self.label))


class Tile:
    """A translate of a prototile."""

    __slots__ = ("proto", "offset", "_support", "_key")

    def __init__(self, proto: Prototile, offset: FieldElement):
        self.proto = proto
        self.offset = offset
        self._support = None
        self._key = None

    @property
    def support(self) -> Polygon:
        if self._support is None:
            self._support = self.proto.polygon.translate(self.offset)
        return self._support

    @property
    def puncture(self) -> FieldElement:
        return self.proto.puncture + self.offset

    @property
    def key(self):
        # Deterministic, translation-covariant sort key.
        if self._key is None:
            self._key = (self.proto.index,) + self.offset.coeffs
        return self._key

    def translate(self, v: FieldElement) -> "Tile":
        return Tile(self.proto, self.offset + v)

    def ident(self):
        return (self.proto.index, self.offset)

    def __eq__(self, other):
        if not isinstance(other, Tile):
            return NotImplemented
        return self.proto is other.proto and self.offset == other.offset

    def __hash__(self):
        return hash((self.proto.index, self.offset))

    def __repr__(self):
        return f"Tile({self.proto.label}@{fast_approx(self.offset):.4g})"


def tiles_meet(t1: Tile, t2: Tile, convention: str) -> bool:
    """Do two tiles meet, under 'adjacent' or 'codim1-face'?

    Raises OverlapError if the interiors overlap without the tiles being
    identical (an invalid configuration).
    """
    if t1 == t2:
        raise OverlapError("tile compared with itself")
    s1, s2 = t1.support, t2.support
    if s1.interiors_intersect(s2):
        raise OverlapError("tile interiors overlap")
    if convention == "adjacent":
        return s1.supports_intersect(s2)
    if convention == "codim1-face":
        if s1.dim == 1:
            return s1.supports_intersect(s2)
        for a, b in s1.edges():
            for c, d in s2.edges():
                if collinear_overlap_positive(a, b, c, d):
                    return True
        return False
    raise GeometryError(f"unknown meeting convention {convention!r}")


class Patch:
    """A finite set of tiles with disjoint interiors, in canonical order."""

    __slots__ = ("tiles", "convention", "_hash", "_canonical", "_index")

    def __init__(self, tiles, convention: str, validate: bool = True):
        self.tiles = tuple(sorted(tiles, key=lambda t: t.key))
        self.convention = convention
        self._hash = None
        self._canonical = None
        self._index = None
        if not self.tiles:
            raise GeometryError("empty patch")
        if validate:
            self._validate()

    def _validate(self):
        n = len(self.tiles)
        seen = set()
        for t in self.tiles:
            key = t.ident()
            if key in seen:
                raise OverlapError("duplicate tile in patch")
            seen.add(key)
        adj = {i: [] for i in range(n)}
        for i in range(n):
            for j in range(i + 1, n):
                ti, tj = self.tiles[i], self.tiles[j]
                if not _bbox_touch(ti.support.bbox(), tj.support.bbox()):
                    continue
                if ti.support.interiors_intersect(tj.support):
                    raise OverlapError("tile interiors overlap in patch")
                if tiles_meet(ti, tj, self.convention):
                    adj[i].append(j)
                    adj[j].append(i)
        # Connectivity under the meeting convention.
        if n > 1:
            seen_i = {0}
            stack = [0]
            while stack:
                for j in adj[stack.pop()]:
                    if j not in seen_i:
                        seen_i.add(j)
                        stack.append(j)
            if len(seen_i) != n:
                raise GeometryError("patch is not connected")

    def index_of(self, tile: Tile) -> int:
        if self._index is None:
            self._index = {t.ident(): i for i, t in enumerate(self.tiles)}
        return self._index[tile.ident()]

    def has_tile(self, tile: Tile) -> bool:
        if self._index is None:
            self._index = {t.ident(): i for i, t in enumerate(self.tiles)}
        return tile.ident() in self._index

    def translate(self, v: FieldElement) -> "Patch":
        return Patch(
            (t.translate(v) for t in self.tiles), self.convention, validate=False
        )

    def key(self):
        return tuple(t.key for t in self.tiles)

    def __eq__(self, other):
        if not isinstance(other, Patch):
            return NotImplemented
        return self.convention == other.convention and self.key() == other.key()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.convention, self.key()))
        return self._hash

    def __len__(self):
        return len(self.tiles)

    def __iter__(self):
        return iter(self.tiles)

    def tiles_touching(self, polygon: Polygon, exclude=()) -> list[Tile]:
        """Tiles whose closed support meets the polygon (prefiltered)."""
        skip = {t.ident() for t in exclude}
        out = []
        pb = polygon.bbox()
        for t in self.tiles:
            if t.ident() in skip:
                continue
            if not _bbox_touch(t.support.bbox(), pb):
                continue
            if t.support.supports_intersect(polygon):
                out.append(t)
        return out

    def __repr__(self):
        labels = ".".join(t.proto.label for t in self.tiles)
        return f"Patch({labels})"


def patch_canonical(p: Patch) -> tuple[Patch, FieldElement]:
    """Translate so the lexicographically least puncture sits at the origin.

    Returns (canonical patch, applied offset).  Two patches are translation
    equivalent iff their canonical forms are equal.
    """
    if p._canonical is not None:
        return p._canonical
    anchor = None
    for t in p.tiles:
        pos = t.puncture
        if anchor is None or cmp_points(pos, anchor) < 0:
            anchor = pos
    offset = -anchor
    if offset.is_zero():
        canon = (p, offset)
    else:
        canon = (p.translate(offset), offset)
    canon[0]._canonical = (canon[0], offset.field.zero)
    p._canonical = canon
    return canon


def patch_union(p: Patch, q: Patch):
    """Union of two aligned patches, or None (the zero marker).

    Tiles with intersecting interiors must be identical, and the union must
    be connected under the (shared) convention; otherwise None.
    """
    if p.convention != q.convention:
        raise GeometryError("convention mismatch")
    tiles = {t.ident(): t for t in p.tiles}
    extra = []
    for t in q.tiles:
        if t.ident() in tiles:
            continue
        extra.append(t)
    for t in extra:
        for s in p.tiles:
            if not _bbox_touch(t.support.bbox(), s.support.bbox()):
                continue
            if t.support.interiors_intersect(s.support):
                return None
    allt = list(tiles.values()) + extra
    try:
        return Patch(allt, p.convention, validate=True)
    except GeometryError:
        return None
