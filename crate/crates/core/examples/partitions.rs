//! Gauges and the tagged partitions the Riemann-type integrators sum over.

use setint::domain::{
    generate_birkhoff_partition, generate_mcshane_partition, is_fine, midpoint_partition,
    sample_tags, Gauge,
};

fn main() -> setint::Result<()> {
    let gauge = Gauge::constant(0.125)?;
    let p = generate_mcshane_partition(&gauge, 0.0, 42)?;
    println!(
        "McShane partition, constant gauge 1/8: {} cells, fine = {}",
        p.cells().len(),
        is_fine(&p, &gauge)
    );
    for c in p.cells().iter().take(5) {
        println!("  tag {:.4} on {:?}", c.tag, c.set.intervals());
    }

    // Near a jump at 1/3 the gauge shrinks with the distance to it.
    let adaptive = Gauge::distance_modulated(1e-3, 0.5, vec![1.0 / 3.0], Some(0.1))?;
    let q = midpoint_partition(&adaptive)?;
    println!(
        "distance-modulated gauge: {} cells, widest {:.4}, covered {:.6}",
        q.cells().len(),
        q.max_cell_width(),
        q.covered_measure()
    );

    let cells = generate_birkhoff_partition(3)?;
    let tags = sample_tags(&cells, 4, 7);
    println!("dyadic depth 3: {} cells", cells.len());
    for (i, ts) in tags.iter().enumerate() {
        let shown: Vec<String> = ts.iter().map(|t| format!("{t:.3}")).collect();
        println!("  assignment {i}: {}", shown.join(" "));
    }
    Ok(())
}
