//! Level-set geometry and topology: triangulated level sets `f⁻¹(c)` in R³
//! (contour loops in R²), per-component Euler characteristics with a
//! watertightness gate, the merge tree of sublevel components, and a
//! canonical encoding of its value-ordered shape.
//!
//! Meshing uses marching tetrahedra on the Kuhn 6-tetrahedra cube split
//! (every cube cut into six tetrahedra sharing the main diagonal, all cubes
//! oriented alike). Unlike cube-based polygonization this has no ambiguous
//! sign pattern, so meshes of regular levels are watertight by construction
//! — which is what the Euler-characteristic computation needs. The cost is
//! a higher triangle count for the same grid.

use std::collections::HashMap;

use nalgebra::DVector;
use rayon::prelude::*;

use crate::config::PointConfiguration;
use crate::error::{Error, Result};
use crate::potential;
use crate::solver::{CriticalKind, CriticalSet};

/// A triangulated approximation of the level set `f⁻¹(c)` in R³.
#[derive(Debug, Clone)]
pub struct LevelSetMesh {
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[usize; 3]>,
    /// The level `c`.
    pub level: f64,
    /// Connected-component id per triangle (components are joined across
    /// shared edges).
    pub component_labels: Vec<usize>,
}

impl LevelSetMesh {
    pub fn component_count(&self) -> usize {
        self.component_labels.iter().copied().max().map_or(0, |m| m + 1)
    }

    /// Triangle indices grouped by component.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.component_count()];
        for (t, &c) in self.component_labels.iter().enumerate() {
            out[c].push(t);
        }
        out
    }
}

/// Closed contour loops of `f = c` for a 2-dimensional configuration.
#[derive(Debug, Clone)]
pub struct ContourSet {
    pub level: f64,
    /// Each loop is a closed polyline (last point connects to the first).
    pub loops: Vec<Vec<[f64; 2]>>,
}

/// `f` for meshing: like the exact potential but total — a sample inside
/// the pole guard returns a large negative sentinel instead of an error, so
/// grid nodes arbitrarily close to a pole simply read as deep inside the
/// sublevel set.
fn sample_f(cfg: &PointConfiguration, x: &DVector<f64>) -> f64 {
    let mut total = 0.0f64;
    for w in cfg.points() {
        let g = (x - w).norm_squared();
        if g <= 0.0 {
            return -1e300;
        }
        total += g.ln();
    }
    total.max(-1e300)
}

/// Axis-aligned meshing box: the hull bounding box inflated about its
/// center by `1 + e^{(c − f_max)/(2r)}` (with `f_max` the largest potential
/// value over corner shells clear of the poles), then grown further until
/// `f > c` on the whole sampled boundary. For large `c` the level set is a
/// near-sphere of radius `e^{c/(2r)}`, which the exponential term tracks.
/// Exposed crate-wide so level-choosing code can estimate grid cell sizes.
pub(crate) fn meshing_box(
    cfg: &PointConfiguration,
    c: f64,
) -> Result<(DVector<f64>, DVector<f64>)> {
    let (lo, hi) = cfg.bounding_box();
    let center = (&lo + &hi) * 0.5;
    let mut half = (&hi - &lo) * 0.5;
    // Degenerate axes (planar/collinear configurations) still need volume.
    let h_max = half.iter().cloned().fold(0.0f64, f64::max).max(0.5 * cfg.scale());
    for v in half.iter_mut() {
        *v = v.max(0.25 * h_max);
    }
    let n = cfg.dimension();
    let corners = |half: &DVector<f64>| -> Vec<DVector<f64>> {
        (0..1usize << n)
            .map(|mask| {
                DVector::from_fn(n, |i, _| {
                    center[i] + if mask >> i & 1 == 1 { half[i] } else { -half[i] }
                })
            })
            .collect()
    };
    // Seed estimate for the growth scale. Poles can sit exactly at bounding
    // box corners (a cube of poles), so probe several corner shells and keep
    // the largest finite value; the exponent is clamped so a pathological
    // probe can never produce an absurd (or infinite) starting box.
    let f_max = [1.0f64, 1.25, 1.5]
        .iter()
        .flat_map(|s| corners(&(&half * *s)))
        .map(|x| sample_f(cfg, &x))
        .filter(|v| *v > -1e299)
        .fold(f64::NEG_INFINITY, f64::max);
    let r = cfg.len() as f64;
    let mut factor = 1.0 + ((c - f_max) / (2.0 * r)).min(3.0).exp();
    if !factor.is_finite() {
        factor = 1.5;
    }
    for _ in 0..200 {
        let h = &half * factor;
        // Boundary probe: corners, face centers, and — decisive when a pole
        // sits close to a face — the nearest boundary point to every pole.
        // The caller re-checks every sampled boundary node after gridding.
        let mut boundary_min = corners(&h)
            .iter()
            .map(|x| sample_f(cfg, x))
            .fold(f64::INFINITY, f64::min);
        for axis in 0..n {
            for sign in [-1.0, 1.0] {
                let mut x = center.clone();
                x[axis] += sign * h[axis];
                boundary_min = boundary_min.min(sample_f(cfg, &x));
            }
        }
        for w in cfg.points() {
            // Project the pole onto the nearest face of the box.
            let mut best_axis = 0usize;
            let mut best_gap = f64::INFINITY;
            for i in 0..n {
                let gap = h[i] - (w[i] - center[i]).abs();
                if gap < best_gap {
                    best_gap = gap;
                    best_axis = i;
                }
            }
            let mut x = w.clone();
            for i in 0..n {
                x[i] = x[i].clamp(center[i] - h[i], center[i] + h[i]);
            }
            x[best_axis] =
                center[best_axis] + h[best_axis] * (w[best_axis] - center[best_axis]).signum();
            boundary_min = boundary_min.min(sample_f(cfg, &x));
        }
        if boundary_min > c {
            return Ok((&center - &h, &center + &h));
        }
        factor *= 1.2;
    }
    Err(Error::BoxTooSmall { c, boundary_min: f64::NEG_INFINITY })
}

/// Global node index in an `(res+1)³` grid.
#[inline]
fn node_id(ix: usize, iy: usize, iz: usize, n: usize) -> u64 {
    (ix + n * (iy + n * iz)) as u64
}

/// The six tetrahedra of the Kuhn split, as cube-corner indices
/// (bit 0 = x, bit 1 = y, bit 2 = z). All six share corners 0 and 7.
const KUHN_TETS: [[usize; 4]; 6] = [
    [0, 1, 3, 7],
    [0, 1, 5, 7],
    [0, 2, 3, 7],
    [0, 2, 6, 7],
    [0, 4, 5, 7],
    [0, 4, 6, 7],
];

/// Triangulate `f⁻¹(c)` for a 3-dimensional configuration on a
/// `resolution³`-cell grid over the automatically sized box. The mesh is
/// empty (no error) when `c` is below the off-pole minimum of `f`;
/// components are labeled by union-find over shared edges.
///
/// `c` must be a regular value: meshing within 1e−6 of a critical value is
/// the caller's responsibility to avoid (offset singular levels by ±δ).
pub fn extract_level_set(
    cfg: &PointConfiguration,
    c: f64,
    resolution: usize,
) -> Result<LevelSetMesh> {
    if cfg.dimension() != 3 {
        return Err(Error::MeshDimension(cfg.dimension()));
    }
    if resolution < 2 {
        return Err(Error::InvalidFamily("mesh resolution must be at least 2".into()));
    }
    let (lo, hi) = meshing_box(cfg, c)?;
    let n = resolution + 1;
    let step = [
        (hi[0] - lo[0]) / resolution as f64,
        (hi[1] - lo[1]) / resolution as f64,
        (hi[2] - lo[2]) / resolution as f64,
    ];
    // Sample the grid, parallel over z-slabs.
    let values: Vec<f64> = (0..n)
        .into_par_iter()
        .flat_map_iter(|iz| {
            let cfg = cfg.clone();
            let lo = lo.clone();
            (0..n).flat_map(move |iy| {
                let cfg = cfg.clone();
                let lo = lo.clone();
                (0..n).map(move |ix| {
                    let x = DVector::from_row_slice(&[
                        lo[0] + step[0] * ix as f64,
                        lo[1] + step[1] * iy as f64,
                        lo[2] + step[2] * iz as f64,
                    ]);
                    sample_f(&cfg, &x)
                })
            })
        })
        .collect();
    let value_at = |ix: usize, iy: usize, iz: usize| values[ix + n * (iy + n * iz)];
    // The box was sized so that f > c strictly on its boundary; verify on
    // every sampled boundary node so no component can be clipped open.
    let mut boundary_min = f64::INFINITY;
    for iz in 0..n {
        for iy in 0..n {
            for ix in 0..n {
                if ix == 0 || iy == 0 || iz == 0 || ix == n - 1 || iy == n - 1 || iz == n - 1
                {
                    boundary_min = boundary_min.min(value_at(ix, iy, iz));
                }
            }
        }
    }
    if boundary_min <= c {
        return Err(Error::BoxTooSmall { c, boundary_min });
    }

    let point_of = |id: u64| -> [f64; 3] {
        let id = id as usize;
        let ix = id % n;
        let iy = (id / n) % n;
        let iz = id / (n * n);
        [
            lo[0] + step[0] * ix as f64,
            lo[1] + step[1] * iy as f64,
            lo[2] + step[2] * iz as f64,
        ]
    };

    let mut vertices: Vec<[f64; 3]> = Vec::new();
    let mut edge_vertex: HashMap<(u64, u64), usize> = HashMap::new();
    let mut triangles: Vec<[usize; 3]> = Vec::new();

    let mut corner_ids = [0u64; 8];
    let mut corner_vals = [0.0f64; 8];
    for iz in 0..resolution {
        for iy in 0..resolution {
            for ix in 0..resolution {
                for bit in 0..8usize {
                    let dx = bit & 1;
                    let dy = bit >> 1 & 1;
                    let dz = bit >> 2 & 1;
                    corner_ids[bit] = node_id(ix + dx, iy + dy, iz + dz, n);
                    corner_vals[bit] = value_at(ix + dx, iy + dy, iz + dz);
                }
                for tet in &KUHN_TETS {
                    march_tet(
                        tet.map(|k| corner_ids[k]),
                        tet.map(|k| corner_vals[k]),
                        c,
                        &point_of,
                        &mut vertices,
                        &mut edge_vertex,
                        &mut triangles,
                    );
                }
            }
        }
    }

    let component_labels = label_components(vertices.len(), &triangles);
    Ok(LevelSetMesh { vertices, triangles, level: c, component_labels })
}

/// Interpolated crossing vertex on a grid edge, deduplicated by the global
/// edge key so every tetrahedron incident to the edge shares it.
fn edge_crossing(
    a: u64,
    b: u64,
    fa: f64,
    fb: f64,
    c: f64,
    point_of: &impl Fn(u64) -> [f64; 3],
    vertices: &mut Vec<[f64; 3]>,
    edge_vertex: &mut HashMap<(u64, u64), usize>,
) -> usize {
    let key = if a < b { (a, b) } else { (b, a) };
    if let Some(&v) = edge_vertex.get(&key) {
        return v;
    }
    let t = ((c - fa) / (fb - fa)).clamp(0.0, 1.0);
    let pa = point_of(a);
    let pb = point_of(b);
    let p = [
        pa[0] + (pb[0] - pa[0]) * t,
        pa[1] + (pb[1] - pa[1]) * t,
        pa[2] + (pb[2] - pa[2]) * t,
    ];
    let id = vertices.len();
    vertices.push(p);
    edge_vertex.insert(key, id);
    id
}

/// Polygonize one tetrahedron. Sign patterns: 1-vs-3 corners give one
/// triangle, 2-vs-2 give a quad split into two. Triangles are oriented with
/// the normal pointing out of the sublevel set `{f < c}`.
fn march_tet(
    ids: [u64; 4],
    vals: [f64; 4],
    c: f64,
    point_of: &impl Fn(u64) -> [f64; 3],
    vertices: &mut Vec<[f64; 3]>,
    edge_vertex: &mut HashMap<(u64, u64), usize>,
    triangles: &mut Vec<[usize; 3]>,
) {
    let inside: Vec<usize> = (0..4).filter(|&k| vals[k] < c).collect();
    if inside.is_empty() || inside.len() == 4 {
        return;
    }
    let outside: Vec<usize> = (0..4).filter(|&k| vals[k] >= c).collect();
    let mut cross = |i: usize, o: usize| {
        edge_crossing(ids[i], ids[o], vals[i], vals[o], c, point_of, vertices, edge_vertex)
    };
    let mut tris: Vec<[usize; 3]> = Vec::new();
    match inside.len() {
        1 => {
            let i = inside[0];
            tris.push([
                cross(i, outside[0]),
                cross(i, outside[1]),
                cross(i, outside[2]),
            ]);
        }
        3 => {
            let o = outside[0];
            tris.push([
                cross(inside[0], o),
                cross(inside[1], o),
                cross(inside[2], o),
            ]);
        }
        2 => {
            // Quad with corners (i0o0, i0o1, i1o1, i1o0), split by a diagonal.
            let (i0, i1) = (inside[0], inside[1]);
            let (o0, o1) = (outside[0], outside[1]);
            let a = cross(i0, o0);
            let b = cross(i0, o1);
            let d = cross(i1, o1);
            let e = cross(i1, o0);
            tris.push([a, b, d]);
            tris.push([a, d, e]);
        }
        _ => unreachable!(),
    }
    // Orient: normal should point from the inside corners toward outside.
    let pin = point_of(ids[inside[0]]);
    let pout = point_of(ids[outside[0]]);
    let up = [pout[0] - pin[0], pout[1] - pin[1], pout[2] - pin[2]];
    for mut t in tris {
        let (v0, v1, v2) = (vertices[t[0]], vertices[t[1]], vertices[t[2]]);
        let e1 = [v1[0] - v0[0], v1[1] - v0[1], v1[2] - v0[2]];
        let e2 = [v2[0] - v0[0], v2[1] - v0[1], v2[2] - v0[2]];
        let nrm = [
            e1[1] * e2[2] - e1[2] * e2[1],
            e1[2] * e2[0] - e1[0] * e2[2],
            e1[0] * e2[1] - e1[1] * e2[0],
        ];
        if nrm[0] * up[0] + nrm[1] * up[1] + nrm[2] * up[2] < 0.0 {
            t.swap(1, 2);
        }
        triangles.push(t);
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }
    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Component id per triangle, connected across shared vertices.
fn label_components(vertex_count: usize, triangles: &[[usize; 3]]) -> Vec<usize> {
    let mut uf = UnionFind::new(vertex_count);
    for t in triangles {
        uf.union(t[0], t[1]);
        uf.union(t[1], t[2]);
    }
    let mut label_of_root: HashMap<usize, usize> = HashMap::new();
    let mut labels = Vec::with_capacity(triangles.len());
    for t in triangles {
        let root = uf.find(t[0]);
        let next = label_of_root.len();
        let label = *label_of_root.entry(root).or_insert(next);
        labels.push(label);
    }
    labels
}

/// Per-component Euler characteristic `χ = V − E + F`, with a hard
/// watertightness gate: every edge of every component must be shared by
/// exactly two triangles (otherwise the grid did not resolve the geometry
/// and χ would be meaningless).
pub fn euler_characteristic(mesh: &LevelSetMesh) -> Result<Vec<i64>> {
    let count = mesh.component_count();
    let mut v_sets: Vec<std::collections::HashSet<usize>> =
        vec![std::collections::HashSet::new(); count];
    let mut e_counts: Vec<HashMap<(usize, usize), usize>> = vec![HashMap::new(); count];
    let mut f_counts = vec![0i64; count];
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let comp = mesh.component_labels[t];
        f_counts[comp] += 1;
        for &v in tri {
            v_sets[comp].insert(v);
        }
        for (a, b) in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])] {
            let key = (a.min(b), a.max(b));
            *e_counts[comp].entry(key).or_insert(0) += 1;
        }
    }
    let mut out = Vec::with_capacity(count);
    for comp in 0..count {
        for (edge, n) in &e_counts[comp] {
            if *n != 2 {
                return Err(Error::NonWatertight(format!(
                    "component {comp}: edge {edge:?} belongs to {n} triangles (expected 2); \
                     raise the resolution"
                )));
            }
        }
        out.push(v_sets[comp].len() as i64 - e_counts[comp].len() as i64 + f_counts[comp]);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Marching squares (N = 2)
// ---------------------------------------------------------------------------

/// Contour loops of `f = c` for a 2-dimensional configuration on a
/// `resolution²` grid. Ambiguous cells (two opposite inside corners) are
/// resolved by the cell-center value, which keeps the loops closed.
pub fn extract_contours(
    cfg: &PointConfiguration,
    c: f64,
    resolution: usize,
) -> Result<ContourSet> {
    if cfg.dimension() != 2 {
        return Err(Error::MeshDimension(cfg.dimension()));
    }
    if resolution < 2 {
        return Err(Error::InvalidFamily("contour resolution must be at least 2".into()));
    }
    let (lo, hi) = meshing_box(cfg, c)?;
    let n = resolution + 1;
    let step = [(hi[0] - lo[0]) / resolution as f64, (hi[1] - lo[1]) / resolution as f64];
    let sample = |ix: usize, iy: usize| -> f64 {
        sample_f(
            cfg,
            &DVector::from_row_slice(&[
                lo[0] + step[0] * ix as f64,
                lo[1] + step[1] * iy as f64,
            ]),
        )
    };
    let mut values = vec![0.0f64; n * n];
    for iy in 0..n {
        for ix in 0..n {
            values[ix + n * iy] = sample(ix, iy);
        }
    }
    let mut boundary_min = f64::INFINITY;
    for i in 0..n {
        for (ix, iy) in [(i, 0), (i, n - 1), (0, i), (n - 1, i)] {
            boundary_min = boundary_min.min(values[ix + n * iy]);
        }
    }
    if boundary_min <= c {
        return Err(Error::BoxTooSmall { c, boundary_min });
    }

    // Segment soup keyed by global edge ids, then chained into loops.
    let edge_point = |a: (usize, usize), b: (usize, usize)| -> [f64; 2] {
        let (fa, fb) = (values[a.0 + n * a.1], values[b.0 + n * b.1]);
        let t = ((c - fa) / (fb - fa)).clamp(0.0, 1.0);
        [
            lo[0] + step[0] * (a.0 as f64 + (b.0 as f64 - a.0 as f64) * t),
            lo[1] + step[1] * (a.1 as f64 + (b.1 as f64 - a.1 as f64) * t),
        ]
    };
    let edge_key = |a: (usize, usize), b: (usize, usize)| -> (u64, u64) {
        let ka = (a.0 + n * a.1) as u64;
        let kb = (b.0 + n * b.1) as u64;
        (ka.min(kb), ka.max(kb))
    };
    let mut segments: Vec<[(u64, u64); 2]> = Vec::new();
    let mut points: HashMap<(u64, u64), [f64; 2]> = HashMap::new();
    for iy in 0..resolution {
        for ix in 0..resolution {
            let corners = [(ix, iy), (ix + 1, iy), (ix + 1, iy + 1), (ix, iy + 1)];
            let inside: Vec<bool> =
                corners.iter().map(|&(x, y)| values[x + n * y] < c).collect();
            let mask = inside
                .iter()
                .enumerate()
                .fold(0usize, |m, (k, &b)| m | ((b as usize) << k));
            if mask == 0 || mask == 0b1111 {
                continue;
            }
            // Crossed cell edges, in corner order (0-1, 1-2, 2-3, 3-0).
            let cell_edges = [
                (corners[0], corners[1]),
                (corners[1], corners[2]),
                (corners[2], corners[3]),
                (corners[3], corners[0]),
            ];
            let crossed: Vec<usize> = (0..4)
                .filter(|&e| {
                    let (a, b) = cell_edges[e];
                    (values[a.0 + n * a.1] < c) != (values[b.0 + n * b.1] < c)
                })
                .collect();
            let mut keyed = |e: usize| -> (u64, u64) {
                let (a, b) = cell_edges[e];
                let key = edge_key(a, b);
                points.entry(key).or_insert_with(|| edge_point(a, b));
                key
            };
            match crossed.len() {
                2 => {
                    let s = [keyed(crossed[0]), keyed(crossed[1])];
                    segments.push(s);
                }
                4 => {
                    // Ambiguous: opposite corners inside. Decide by the
                    // center value: center inside joins the diagonal pair.
                    let cx = lo[0] + step[0] * (ix as f64 + 0.5);
                    let cy = lo[1] + step[1] * (iy as f64 + 0.5);
                    let center_inside =
                        sample_f(cfg, &DVector::from_row_slice(&[cx, cy])) < c;
                    // Corner 0 inside (mask 0b0101) or corner 1 inside
                    // (mask 0b1010); pair edges so the inside regions
                    // connect exactly when the center agrees with them.
                    let corner0_inside = inside[0];
                    let pairs: [(usize, usize); 2] = if center_inside == corner0_inside {
                        [(3, 0), (1, 2)]
                    } else {
                        [(0, 1), (2, 3)]
                    };
                    for (ea, eb) in pairs {
                        let s = [keyed(ea), keyed(eb)];
                        segments.push(s);
                    }
                }
                _ => unreachable!("a square cell crosses an even number of edges"),
            }
        }
    }

    // Chain: every contour point has exactly two incident segments (loops
    // cannot end, since f > c on the boundary).
    let mut adj: HashMap<(u64, u64), Vec<usize>> = HashMap::new();
    for (si, s) in segments.iter().enumerate() {
        adj.entry(s[0]).or_default().push(si);
        adj.entry(s[1]).or_default().push(si);
    }
    for (k, v) in &adj {
        if v.len() != 2 {
            return Err(Error::NonWatertight(format!(
                "contour point {k:?} has {} incident segments (expected 2)",
                v.len()
            )));
        }
    }
    let mut used = vec![false; segments.len()];
    let mut loops: Vec<Vec<[f64; 2]>> = Vec::new();
    for start in 0..segments.len() {
        if used[start] {
            continue;
        }
        let mut path: Vec<(u64, u64)> = Vec::new();
        let mut seg = start;
        let mut at = segments[start][0];
        loop {
            used[seg] = true;
            path.push(at);
            let s = segments[seg];
            at = if s[0] == at { s[1] } else { s[0] };
            let next = adj[&at].iter().copied().find(|&t| !used[t]);
            match next {
                Some(t) => seg = t,
                None => break,
            }
        }
        loops.push(path.iter().map(|k| points[k]).collect());
    }
    // Deterministic order: loops sorted by their lexicographically smallest
    // point.
    loops.sort_by(|a, b| {
        let ka = a
            .iter()
            .cloned()
            .min_by(|p, q| p[0].total_cmp(&q[0]).then(p[1].total_cmp(&q[1])))
            .unwrap();
        let kb = b
            .iter()
            .cloned()
            .min_by(|p, q| p[0].total_cmp(&q[0]).then(p[1].total_cmp(&q[1])))
            .unwrap();
        ka[0].total_cmp(&kb[0]).then(ka[1].total_cmp(&kb[1]))
    });
    Ok(ContourSet { level: c, loops })
}

// ---------------------------------------------------------------------------
// Merge tree
// ---------------------------------------------------------------------------

/// One node of a [`MergeTree`].
#[derive(Debug, Clone)]
pub struct MergeNode {
    /// Critical value; `None` is `−∞` (pole leaves).
    pub value: Option<f64>,
    /// Location of the critical point this node represents.
    pub location: DVector<f64>,
    /// Leaf nodes have no children; merge nodes have exactly two.
    pub children: Vec<usize>,
    pub parent: Option<usize>,
    /// True for pole leaves.
    pub is_pole: bool,
}

/// The merge tree of sublevel-set components: one leaf per minimum
/// (absolute or local), one binary internal node per saddle, ordered by
/// critical value.
#[derive(Debug, Clone)]
pub struct MergeTree {
    pub nodes: Vec<MergeNode>,
    pub root: usize,
    pub leaves: Vec<usize>,
}

impl MergeTree {
    /// Number of tree edges crossing the value `c` — equivalently, the
    /// number of sublevel (and hence level-set) components at a regular
    /// value `c`. The root edge extends to `+∞`.
    pub fn cut_count(&self, c: f64) -> usize {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(id, node)| {
                let below = node.value.map_or(true, |v| v < c);
                let parent_above = match node.parent {
                    Some(p) => self.nodes[p].value.map_or(false, |v| v > c),
                    None => *id == self.root, // root edge continues upward
                };
                below && parent_above
            })
            .count()
    }
}

/// Steepest-descent trajectory from `start` until it lands within
/// `capture_radius` of one of the `targets`; returns the target index.
fn descend_to_target(
    cfg: &PointConfiguration,
    start: &DVector<f64>,
    targets: &[DVector<f64>],
    capture_radius: f64,
) -> Result<usize> {
    let diam = cfg.scale();
    let max_step = 0.05 * diam;
    let mut x = start.clone();
    let mut alpha = 0.01 * diam;
    let mut f_cur = potential::eval(cfg, &x)?.log_value;
    for _ in 0..100_000 {
        if let Some((k, _)) = targets
            .iter()
            .enumerate()
            .map(|(k, t)| (k, (&x - t).norm()))
            .filter(|(_, d)| *d <= capture_radius)
            .min_by(|a, b| a.1.total_cmp(&b.1))
        {
            return Ok(k);
        }
        let g = match potential::gradient(cfg, &x) {
            Ok(g) => g,
            // Inside the pole guard: the trajectory has effectively reached
            // that pole.
            Err(Error::PoleEvaluation { index, .. }) => {
                let w = &cfg.points()[index];
                return targets
                    .iter()
                    .position(|t| (t - w).norm() < capture_radius)
                    .ok_or_else(|| {
                        Error::DescentFailure(format!(
                            "trajectory fell into pole {index}, which is not a target"
                        ))
                    });
            }
            Err(e) => return Err(e),
        };
        let gn = g.norm();
        if gn == 0.0 {
            return Err(Error::DescentFailure(format!(
                "gradient vanished at {:?} away from every target",
                x.as_slice()
            )));
        }
        let dir = -&g / gn;
        let mut s = alpha.min(max_step);
        let mut moved = false;
        for _ in 0..40 {
            let cand = &x + &dir * s;
            let f_cand = match potential::eval(cfg, &cand) {
                Ok(v) => v.log_value,
                Err(_) => f64::NEG_INFINITY, // stepping into a pole guard: downhill
            };
            if f_cand < f_cur {
                x = cand;
                f_cur = f_cand;
                alpha = s * 1.5;
                moved = true;
                break;
            }
            s *= 0.5;
        }
        if !moved {
            return Err(Error::DescentFailure(format!(
                "no descending step from {:?} (|grad| = {gn:.3e}, f = {f_cur:.6})",
                x.as_slice()
            )));
        }
    }
    Err(Error::DescentFailure(format!(
        "step budget exhausted at {:?} (f = {f_cur:.6}); targets at {:?}",
        x.as_slice(),
        targets.iter().map(|t| (&x - t).norm()).collect::<Vec<_>>()
    )))
}

/// Build the merge tree of a global-Morse critical set: minima (poles and
/// local) open leaves; saddles, processed in increasing value, merge the
/// two components reached by steepest descent launched along ± the negative
/// eigenvector. A saddle whose two descents land in the same component
/// would mean the sublevel topology changed without a `b₀` drop — for these
/// potentials that contradicts the sphere dichotomy, so it is reported as a
/// topology anomaly rather than patched over.
pub fn merge_tree(cfg: &PointConfiguration, set: &CriticalSet) -> Result<MergeTree> {
    if !set.global_morse {
        return Err(Error::SolverFailure(
            "merge tree requires a global-Morse critical set (distinct values, no degenerate \
             points)"
            .into(),
        ));
    }
    let diam = cfg.scale();
    let capture_radius = 1e-3 * diam;

    let mut nodes: Vec<MergeNode> = Vec::new();
    let mut leaves: Vec<usize> = Vec::new();
    // Basin targets: every minimum, in `set.points` order.
    let mut targets: Vec<DVector<f64>> = Vec::new();
    let mut target_node: Vec<usize> = Vec::new();
    for p in &set.points {
        match p.kind {
            CriticalKind::AbsoluteMinimum | CriticalKind::LocalMinimum => {
                let id = nodes.len();
                nodes.push(MergeNode {
                    value: p.value,
                    location: p.location.clone(),
                    children: Vec::new(),
                    parent: None,
                    is_pole: p.kind == CriticalKind::AbsoluteMinimum,
                });
                leaves.push(id);
                targets.push(p.location.clone());
                target_node.push(id);
            }
            _ => {}
        }
    }

    let mut saddles: Vec<&crate::solver::CriticalPoint> =
        set.points.iter().filter(|p| p.kind == CriticalKind::Saddle).collect();
    saddles.sort_by(|a, b| {
        a.value.unwrap_or(f64::NEG_INFINITY).total_cmp(&b.value.unwrap_or(f64::NEG_INFINITY))
    });

    let mut uf = UnionFind::new(targets.len());
    // Current top tree node of each basin component, by union-find root.
    let mut top_node: HashMap<usize, usize> = HashMap::new();
    for (k, &node) in target_node.iter().enumerate() {
        top_node.insert(k, node);
    }

    for saddle in saddles {
        let h = potential::hessian(cfg, &saddle.location)?;
        let eig = h.symmetric_eigen();
        let (neg_idx, _) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty spectrum");
        let v = eig.eigenvectors.column(neg_idx).into_owned();
        let eps = 1e-3 * diam;
        let mut sides = [0usize; 2];
        for (si, sign) in [1.0f64, -1.0].iter().enumerate() {
            let start = &saddle.location + &v * (*sign * eps);
            sides[si] = descend_to_target(cfg, &start, &targets, capture_radius)?;
        }
        let (ra, rb) = (uf.find(sides[0]), uf.find(sides[1]));
        if ra == rb {
            return Err(Error::TopologyAnomaly(format!(
                "saddle at {:?} (value {:?}) merges a component with itself: both descents \
                 reached basin of {:?}",
                saddle.location.as_slice(),
                saddle.value,
                targets[sides[0]].as_slice()
            )));
        }
        let left = top_node[&ra];
        let right = top_node[&rb];
        let id = nodes.len();
        nodes.push(MergeNode {
            value: saddle.value,
            location: saddle.location.clone(),
            children: vec![left, right],
            parent: None,
            is_pole: false,
        });
        nodes[left].parent = Some(id);
        nodes[right].parent = Some(id);
        uf.union(ra, rb);
        let new_root = uf.find(ra);
        top_node.remove(&ra);
        top_node.remove(&rb);
        top_node.insert(new_root, id);
    }

    if top_node.len() != 1 {
        return Err(Error::TopologyAnomaly(format!(
            "{} components remain after all saddles merged; expected 1",
            top_node.len()
        )));
    }
    let root = *top_node.values().next().unwrap();
    Ok(MergeTree { nodes, root, leaves })
}

/// Canonical string of the value-ordered tree shape. Leaves print as `p`
/// (pole) or `m` (finite local minimum, suffixed with its value rank among
/// all finite critical values); merge nodes print `(A,B)#k` with `k` the
/// saddle's value rank and children ordered by minimal leaf value (ties
/// broken by the encoding itself). Equal strings ⇔ isomorphic value-ordered
/// trees, independent of solver seed and pole ordering.
pub fn topological_type(tree: &MergeTree) -> String {
    // Rank all finite values jointly.
    let mut finite: Vec<f64> = tree.nodes.iter().filter_map(|n| n.value).collect();
    finite.sort_by(|a, b| a.total_cmp(b));
    let rank_of = |v: f64| finite.iter().position(|x| *x == v).unwrap_or(usize::MAX);

    fn min_leaf(tree: &MergeTree, id: usize) -> f64 {
        let node = &tree.nodes[id];
        if node.children.is_empty() {
            node.value.unwrap_or(f64::NEG_INFINITY)
        } else {
            node.children
                .iter()
                .map(|&c| min_leaf(tree, c))
                .fold(f64::INFINITY, f64::min)
        }
    }

    fn encode(tree: &MergeTree, id: usize, rank_of: &impl Fn(f64) -> usize) -> String {
        let node = &tree.nodes[id];
        if node.children.is_empty() {
            return match node.value {
                None => "p".to_string(),
                Some(v) => format!("m#{}", rank_of(v)),
            };
        }
        let mut parts: Vec<(f64, String)> = node
            .children
            .iter()
            .map(|&c| (min_leaf(tree, c), encode(tree, c, rank_of)))
            .collect();
        parts.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        let inner: Vec<String> = parts.into_iter().map(|(_, s)| s).collect();
        format!("({})#{}", inner.join(","), rank_of(tree.nodes[id].value.unwrap()))
    }

    encode(tree, tree.root, &rank_of)
}

/// One row of a Betti trace.
#[derive(Debug, Clone)]
pub struct BettiRow {
    pub c: f64,
    pub components: usize,
    pub chi: Vec<i64>,
}

/// Mesh a list of regular levels, recording the component count and the
/// per-component Euler characteristics, and cross-check each count against
/// the merge tree's cut count. Levels closer than 1e−4 of the critical
/// value spread to a critical value are refused; a count disagreeing with
/// the tree is a topology anomaly.
pub fn betti_trace(
    cfg: &PointConfiguration,
    set: &CriticalSet,
    tree: &MergeTree,
    levels: &[f64],
    resolution: usize,
) -> Result<Vec<BettiRow>> {
    let crit_values: Vec<f64> = set.points.iter().filter_map(|p| p.value).collect();
    let spread = crit_values.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v))
        - crit_values.iter().fold(f64::INFINITY, |m, v| m.min(*v));
    let tol = 1e-4 * spread.max(1e-12);
    let mut rows = Vec::with_capacity(levels.len());
    for &c in levels {
        if let Some(nearest) = crit_values
            .iter()
            .copied()
            .min_by(|a, b| (a - c).abs().total_cmp(&(b - c).abs()))
        {
            if (nearest - c).abs() < tol {
                return Err(Error::SingularLevel { c, nearest, tol });
            }
        }
        let mesh = extract_level_set(cfg, c, resolution)?;
        let chi = euler_characteristic(&mesh)?;
        let components = mesh.component_count();
        let expected = tree.cut_count(c);
        if components != expected {
            return Err(Error::TopologyAnomaly(format!(
                "level {c}: mesh has {components} components but the merge tree cuts \
                 {expected} edges; raise the resolution or inspect the tree"
            )));
        }
        rows.push(BettiRow { c, components, chi });
    }
    Ok(rows)
}
