//! Byte-stable serialization of every artifact the tools emit: critical-set
//! reports (JSON and CSV), merge trees, Betti traces, OBJ meshes, contour
//! plot scripts, sweep tables, and the run manifest.
//!
//! Identical inputs must produce identical output bytes, so every float is
//! written with exactly 17 significant digits (enough to round-trip any
//! IEEE-754 double) and JSON objects keep their keys sorted.

use serde_json::{json, Value};

use crate::solver::{
    Bifurcation, CriticalKind, CriticalSet, MorseSummary, SolverOptions, StabilityReport,
    SweepResult,
};
use crate::topology::{BettiRow, ContourSet, LevelSetMesh, MergeTree};

/// 17-significant-digit scientific notation; round-trips every finite f64.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{v:.16e}")
}

fn push_json_string(out: &mut String, s: &str) {
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
}

fn write_value(out: &mut String, v: &Value) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                out.push_str(&format_float(n.as_f64().unwrap()));
            }
        }
        Value::String(s) => push_json_string(out, s),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(out, item);
            }
            out.push(']');
        }
        Value::Object(map) => {
            // serde_json's default map is a BTreeMap, so iteration is
            // already sorted by key.
            out.push('{');
            for (i, (k, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                push_json_string(out, k);
                out.push(':');
                write_value(out, item);
            }
            out.push('}');
        }
    }
}

/// Serialize a JSON value with the fixed float format and sorted keys.
pub fn to_json_string(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v);
    out.push('\n');
    out
}

fn floats(values: impl IntoIterator<Item = f64>) -> Value {
    Value::Array(values.into_iter().map(|v| json!(v)).collect())
}

pub fn solver_options_json(opts: &SolverOptions) -> Value {
    json!({
        "grad_tol": opts.grad_tol,
        "dedup_radius": opts.dedup_radius,
        "eig_zero_threshold": opts.eig_zero_threshold,
        "max_newton_iters": opts.max_newton_iters,
        "grid_density": opts.grid_density,
        "random_seed_count": opts.random_seed_count,
        "fixed_point_seed_count": opts.fixed_point_seed_count,
        "rng_seed": opts.rng_seed,
    })
}

/// The critical-set report:
/// `{"r","h","saddles","local_morse","global_morse","critical_points":[…],
///   "certification":{…}}` with per-point
/// `{"location","value","negativity","nullity","spectrum","kind"}`.
pub fn critical_set_json(set: &CriticalSet) -> Value {
    let points: Vec<Value> = set
        .points
        .iter()
        .map(|p| {
            json!({
                "location": floats(p.location.iter().copied()),
                "value": p.value.map_or(Value::Null, |v| json!(v)),
                "negativity": p.negativity,
                "nullity": p.nullity,
                "spectrum": floats(p.spectrum.iter().copied()),
                "kind": p.kind.as_str(),
            })
        })
        .collect();
    let cert = &set.certification;
    json!({
        "r": set.r,
        "h": set.h,
        "saddles": set.saddles,
        "local_morse": set.local_morse,
        "global_morse": set.global_morse,
        "span_dim": set.span_dim,
        "critical_points": points,
        "certification": {
            "grid_seeds": cert.grid_seeds,
            "random_seeds": cert.random_seeds,
            "fixed_point_seeds": cert.fixed_point_seeds,
            "midpoint_seeds": cert.midpoint_seeds,
            "seeds_total": cert.seeds_total,
            "seeds_converged": cert.seeds_converged,
            "seeds_dropped": cert.seeds_dropped,
            "max_grad_residual": cert.max_grad_residual,
            "dedup_radius": cert.dedup_radius,
            "rng_seed": cert.rng_seed,
            "near_duplicate_warning": cert.near_duplicate_warning,
        },
    })
}

/// CSV alternative: one row per critical point; vectors are
/// semicolon-joined within their cell, `-inf` stands for the pole value.
pub fn critical_set_csv(set: &CriticalSet) -> String {
    let mut out = String::from("kind,value,negativity,nullity,grad_norm,location,spectrum\n");
    for p in &set.points {
        let location: Vec<String> = p.location.iter().map(|v| format_float(*v)).collect();
        let spectrum: Vec<String> = p.spectrum.iter().map(|v| format_float(*v)).collect();
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            p.kind.as_str(),
            p.value.map_or("-inf".into(), format_float),
            p.negativity,
            p.nullity,
            format_float(p.grad_norm),
            location.join(";"),
            spectrum.join(";"),
        ));
    }
    out
}

pub fn morse_summary_json(summary: &MorseSummary) -> Value {
    json!({
        "r": summary.r,
        "h": summary.h,
        "saddles": summary.saddles,
        "span_dim": summary.span_dim,
        "expected_saddles": summary.expected_saddles,
        "relation": summary.relation,
    })
}

/// Merge-tree export: `{"leaves":[…], "merges":[…]}` plus the canonical
/// string. Node ids index the tree's own node list, so the JSON can be
/// cross-referenced with descent diagnostics.
pub fn merge_tree_json(tree: &MergeTree) -> Value {
    let leaves: Vec<Value> = tree
        .leaves
        .iter()
        .map(|&id| {
            let n = &tree.nodes[id];
            json!({
                "id": id,
                "value": n.value.map_or(Value::Null, |v| json!(v)),
                "location": floats(n.location.iter().copied()),
                "kind": if n.is_pole { "pole" } else { "minimum" },
            })
        })
        .collect();
    let mut merge_ids: Vec<usize> = (0..tree.nodes.len())
        .filter(|&id| !tree.nodes[id].children.is_empty())
        .collect();
    merge_ids.sort_by(|&a, &b| {
        tree.nodes[a]
            .value
            .unwrap_or(f64::NEG_INFINITY)
            .total_cmp(&tree.nodes[b].value.unwrap_or(f64::NEG_INFINITY))
    });
    let merges: Vec<Value> = merge_ids
        .iter()
        .map(|&id| {
            let n = &tree.nodes[id];
            json!({
                "id": id,
                "value": n.value.map_or(Value::Null, |v| json!(v)),
                "left": n.children[0],
                "right": n.children[1],
                "location": floats(n.location.iter().copied()),
            })
        })
        .collect();
    json!({
        "leaves": leaves,
        "merges": merges,
        "root": tree.root,
        "canonical": crate::topology::topological_type(tree),
    })
}

/// Betti trace CSV: `c,components,chi_list` with the χ values
/// semicolon-joined.
pub fn betti_csv(rows: &[BettiRow]) -> String {
    let mut out = String::from("c,components,chi_list\n");
    for row in rows {
        let chi: Vec<String> = row.chi.iter().map(|v| v.to_string()).collect();
        out.push_str(&format!(
            "{},{},{}\n",
            format_float(row.c),
            row.components,
            chi.join(";")
        ));
    }
    out
}

/// Wavefront OBJ export: all vertices first, then one named object per
/// connected component holding its faces (indices are global and
/// 1-based, as OBJ requires).
pub fn mesh_obj(mesh: &LevelSetMesh) -> String {
    let mut out = format!("# level set f = {}\n", format_float(mesh.level));
    for v in &mesh.vertices {
        out.push_str(&format!(
            "v {} {} {}\n",
            format_float(v[0]),
            format_float(v[1]),
            format_float(v[2])
        ));
    }
    for (comp, triangles) in mesh.components().iter().enumerate() {
        out.push_str(&format!("o component_{comp}\n"));
        for &t in triangles {
            let tri = mesh.triangles[t];
            out.push_str(&format!("f {} {} {}\n", tri[0] + 1, tri[1] + 1, tri[2] + 1));
        }
    }
    out
}

/// Topology sidecar for a meshed level: component count and per-component χ.
pub fn level_topology_json(mesh: &LevelSetMesh, chi: &[i64]) -> Value {
    json!({
        "level": mesh.level,
        "vertices": mesh.vertices.len(),
        "triangles": mesh.triangles.len(),
        "components": mesh.component_count(),
        "chi": chi,
    })
}

/// A self-contained plotting script for 2D contour figures (no input files;
/// the loop coordinates are embedded).
pub fn contour_plot_script(contours: &[ContourSet]) -> String {
    let mut out = String::from(
        "#!/usr/bin/env python3\n\
         # Self-contained contour figure; run with matplotlib installed.\n\
         import matplotlib.pyplot as plt\n\nlevels = [\n",
    );
    for cs in contours {
        out.push_str(&format!("    ({}, [\n", format_float(cs.level)));
        for l in &cs.loops {
            out.push_str("        [");
            for p in l {
                out.push_str(&format!("({},{}),", format_float(p[0]), format_float(p[1])));
            }
            out.push_str("],\n");
        }
        out.push_str("    ]),\n");
    }
    out.push_str(
        "]\n\nfor level, loops in levels:\n    for loop in loops:\n        xs = [p[0] for p in \
         loop] + [loop[0][0]]\n        ys = [p[1] for p in loop] + [loop[0][1]]\n        \
         plt.plot(xs, ys, label=f\"f = {level:.3f}\")\nplt.gca().set_aspect(\"equal\")\n\
         plt.title(\"level curves of the log potential\")\nplt.savefig(\"contours.png\", \
         dpi=160)\nprint(\"wrote contours.png\")\n",
    );
    out
}

/// Per-sample sweep table.
pub fn sweep_samples_csv(result: &SweepResult) -> String {
    let mut out = String::from("parameter,r,h,saddles,degenerate,min_abs_lambda\n");
    for row in &result.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            format_float(row.parameter),
            row.r,
            row.h,
            row.saddles,
            row.degenerate,
            format_float(row.min_abs_lambda),
        ));
    }
    out
}

/// Refined bifurcation table: one row per located eigenvalue sign change.
pub fn sweep_bifurcations_csv(bifurcations: &[Bifurcation]) -> String {
    let mut out = String::from("parameter,location\n");
    for b in bifurcations {
        let loc: Vec<String> = b.location.iter().map(|v| format_float(*v)).collect();
        out.push_str(&format!("{},{}\n", format_float(b.parameter), loc.join(";")));
    }
    out
}

pub fn stability_json(report: &StabilityReport) -> Value {
    json!({
        "base_h": report.base_h,
        "trials": report.trials,
        "h_preserved": report.h_preserved,
        "global_morse_count": report.global_morse_count,
        "delta": report.delta,
        "stability_radius_estimate": report.stability_radius_estimate,
    })
}

/// Reproducibility record written alongside every output directory.
#[derive(Debug, Clone)]
pub struct RunManifest {
    /// The invoked command line, joined with spaces.
    pub command: String,
    /// Input path or family descriptor.
    pub input: String,
    /// Solver options and any extraction parameters.
    pub options: Value,
    /// Files written, relative to the output directory.
    pub outputs: Vec<String>,
    pub rng_seed: u64,
    pub version: String,
}

impl RunManifest {
    pub fn new(command: String, input: String, options: Value, rng_seed: u64) -> Self {
        Self {
            command,
            input,
            options,
            outputs: Vec::new(),
            rng_seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "input": self.input,
            "options": self.options,
            "outputs": self.outputs,
            "rng_seed": self.rng_seed,
            "version": self.version,
        })
    }
}

/// Count of non-pole kinds, used by the CLI summary line.
pub fn kind_counts(set: &CriticalSet) -> (usize, usize, usize) {
    let mut minima = 0;
    let mut saddles = 0;
    let mut degenerate = 0;
    for p in &set.points {
        match p.kind {
            CriticalKind::LocalMinimum => minima += 1,
            CriticalKind::Saddle => saddles += 1,
            CriticalKind::Degenerate => degenerate += 1,
            CriticalKind::AbsoluteMinimum => {}
        }
    }
    (minima, saddles, degenerate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;
    use crate::solver::find_critical_points;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn float_format_is_fixed_width_17_digits() {
        assert_eq!(format_float(1.0), "1.0000000000000000e0");
        assert_eq!(format_float(1.0 / 3.0), "3.3333333333333331e-1");
        assert_eq!(format_float(-0.5), "-5.0000000000000000e-1");
        assert_eq!(format_float(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn float_format_round_trips_bitwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..2000 {
            let v = f64::from_bits(rng.random::<u64>());
            if !v.is_finite() {
                continue;
            }
            let parsed: f64 = format_float(v).parse().unwrap();
            assert_eq!(parsed.to_bits(), v.to_bits(), "{v} mangled by formatting");
        }
        // Extremes.
        for v in [f64::MIN_POSITIVE, f64::MAX, 5e-324, -5e-324, 0.0, -0.0] {
            let parsed: f64 = format_float(v).parse().unwrap();
            assert_eq!(parsed.to_bits(), v.to_bits());
        }
    }

    #[test]
    fn json_writer_sorts_keys_and_handles_null() {
        let v = serde_json::json!({
            "zebra": 1,
            "alpha": Value::Null,
            "nested": {"y": [1.5, 2], "x": "a\"b"},
        });
        let s = to_json_string(&v);
        assert_eq!(
            s,
            "{\"alpha\":null,\"nested\":{\"x\":\"a\\\"b\",\"y\":[1.5000000000000000e0,2]},\
             \"zebra\":1}\n"
        );
    }

    #[test]
    fn report_bytes_are_stable_across_runs() {
        let cfg = families::tetrahedron().config;
        let opts = SolverOptions {
            grid_density: 5,
            random_seed_count: 60,
            ..Default::default()
        };
        let a = to_json_string(&critical_set_json(&find_critical_points(&cfg, &opts).unwrap()));
        let b = to_json_string(&critical_set_json(&find_critical_points(&cfg, &opts).unwrap()));
        assert_eq!(a, b);
        assert!(a.contains("\"critical_points\""));
        assert!(a.contains("\"certification\""));
        // Pole rows carry a null value.
        assert!(a.contains("\"value\":null"));
    }

    #[test]
    fn csv_has_one_row_per_point() {
        let cfg = families::tetrahedron().config;
        let opts = SolverOptions {
            grid_density: 5,
            random_seed_count: 60,
            ..Default::default()
        };
        let set = find_critical_points(&cfg, &opts).unwrap();
        let csv = critical_set_csv(&set);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 1 + set.points.len());
        assert_eq!(lines[0], "kind,value,negativity,nullity,grad_norm,location,spectrum");
        assert!(lines[1].starts_with("absolute_minimum,-inf,"));
    }

    #[test]
    fn obj_export_is_well_formed() {
        let cfg = families::tetrahedron().config;
        let mesh = crate::topology::extract_level_set(&cfg, 10.0, 24).unwrap();
        let obj = mesh_obj(&mesh);
        let v_lines = obj.lines().filter(|l| l.starts_with("v ")).count();
        let f_lines: Vec<&str> = obj.lines().filter(|l| l.starts_with("f ")).collect();
        assert_eq!(v_lines, mesh.vertices.len());
        assert_eq!(f_lines.len(), mesh.triangles.len());
        assert!(obj.contains("o component_0"));
        for line in f_lines {
            for idx in line[2..].split_whitespace() {
                let i: usize = idx.parse().unwrap();
                assert!(i >= 1 && i <= mesh.vertices.len(), "OBJ indices are 1-based");
            }
        }
    }

    #[test]
    fn merge_tree_json_shape() {
        let base = families::tetrahedron().config;
        let jitter = [
            [0.013, -0.007, 0.019],
            [-0.011, 0.017, 0.005],
            [0.008, 0.009, -0.023],
            [-0.016, -0.012, 0.011],
        ];
        let cfg = crate::config::PointConfiguration::new(
            base.points()
                .iter()
                .zip(jitter.iter())
                .map(|(p, j)| p + nalgebra::DVector::from_row_slice(j))
                .collect(),
        )
        .unwrap();
        let opts = SolverOptions {
            grid_density: 5,
            random_seed_count: 60,
            ..Default::default()
        };
        let set = find_critical_points(&cfg, &opts).unwrap();
        let tree = crate::topology::merge_tree(&cfg, &set).unwrap();
        let v = merge_tree_json(&tree);
        assert_eq!(v["leaves"].as_array().unwrap().len(), 5);
        assert_eq!(v["merges"].as_array().unwrap().len(), 4);
        assert!(v["canonical"].as_str().unwrap().contains('p'));
        // Merge values ascend.
        let values: Vec<f64> = v["merges"]
            .as_array()
            .unwrap()
            .iter()
            .map(|m| m["value"].as_f64().unwrap())
            .collect();
        assert!(values.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn manifest_records_version_and_outputs() {
        let mut m = RunManifest::new(
            "analyze --points x.json".into(),
            "x.json".into(),
            solver_options_json(&SolverOptions::default()),
            0,
        );
        m.outputs.push("report.json".into());
        let s = to_json_string(&m.to_json());
        assert!(s.contains("\"version\":\"0.1.0\""));
        assert!(s.contains("report.json"));
        assert!(s.contains("\"rng_seed\":0"));
    }
}
