//! Topology of the level sets {f = c} in R³.
//!
//! Far below the least critical value the level set is one small sphere
//! around each pole; far above the largest it is a single large sphere;
//! in between, components merge exactly at the saddles. The merge tree
//! records that history, and marching-cubes meshes at regular levels must
//! agree with it: the number of mesh components at level c equals the
//! number of tree edges crossing c, and every closed component has Euler
//! characteristic 2 (the level sets never grow handles).
//!
//! Run with: `cargo run --example level_set_topology`

use lemniscate::families;
use lemniscate::report;
use lemniscate::solver::SolverOptions;
use lemniscate::topology;
use lemniscate::verify;

fn main() {
    // The pristine tetrahedron is too symmetric for a merge tree: its four
    // saddles share one critical value, so the merge order is ambiguous.
    // A small generic jitter of the poles breaks the tie without changing
    // the inventory — that is the generic ("globally Morse") situation.
    let fam = families::tetrahedron();
    let opts = SolverOptions::default();
    let (pcfg, set) = verify::global_morse_perturbation(&fam.config, 1e-3 * fam.config.scale(), &opts)
        .expect("generic perturbation");
    let cfg = &pcfg;

    // The merge tree of sublevel-set components.
    let tree = topology::merge_tree(cfg, &set).expect("merge tree");
    println!("merge tree: {}", topology::topological_type(&tree));
    println!("  {} leaves ({} poles + {} interior minimum/minima), last merge at f = {:.9}",
        tree.leaves.len(), set.r, set.h, tree.nodes[tree.root].value.unwrap());

    // Pick regular levels whose mesh-scale features are actually resolvable
    // at this grid resolution, then mesh each one and compare.
    let resolution = 96;
    let levels = verify::resolvable_levels(cfg, &set, resolution, 3).expect("levels");
    println!("\n{:<24} {:>10} {:>10} {:>6}", "level", "mesh comps", "tree cut", "chi");
    let rows = topology::betti_trace(cfg, &set, &tree, &levels, resolution).expect("trace");
    for row in &rows {
        let cut = tree.cut_count(row.c);
        println!(
            "{:<24.12} {:>10} {:>10} {:>6?}",
            row.c, row.components, cut, row.chi,
        );
        assert_eq!(row.components, cut, "mesh and merge tree disagree");
        assert!(row.chi.iter().all(|&x| x == 2), "non-sphere component");
    }

    // One mesh in detail, written as OBJ if you want to look at it:
    //     cargo run --example level_set_topology > /dev/null 2> mesh.obj
    let c = levels[levels.len() - 1];
    let mesh = topology::extract_level_set(cfg, c, resolution).expect("mesh");
    let chi = topology::euler_characteristic(&mesh).expect("chi");
    println!(
        "\ntop level f = {:.6}: {} vertices, {} triangles, {} component(s), chi = {:?}",
        c,
        mesh.vertices.len(),
        mesh.triangles.len(),
        mesh.component_count(),
        chi,
    );
    eprint!("{}", report::mesh_obj(&mesh));

    // Below every critical value the components are tiny spheres around the
    // poles with exactly computable radii e^{(c - C_k)/2}.
    let v_min = set
        .interior_points()
        .filter_map(|p| p.value)
        .fold(f64::INFINITY, f64::min);
    let c_low = v_min - 2.0;
    let mesh_low = topology::extract_level_set(cfg, c_low, resolution).expect("mesh");
    println!(
        "\nfar below the least critical value (f = {:.3}): {} components, one per pole",
        c_low,
        mesh_low.component_count(),
    );
}
