// scratch probe: full-quality slab run vs v on the strip
use charpde::nullsol::*;
use charpde::polyalg::{parse_poly, slab_decompose};

fn main() {
    let dec = slab_decompose(&parse_poly("i*x1 + x2^2", 2).unwrap(), true).unwrap();
    let grid = EvalGrid { x1_min: -1.6, x1_max: 0.4, xd_min: -0.25, xd_max: 0.25, h: 0.1 };
    let params = SlabParams::new(1.0, 0.25, 1.5, 80);
    let t0 = std::time::Instant::now();
    let run = slab_solution(&dec, &params, None, &grid).unwrap();
    println!("slab run took {:?}, degraded={} empirical_tail={:e} rigorous={:e}", t0.elapsed(), run.degraded, run.empirical_tail, run.rigorous_tail);
    println!("measured C={:e} R={:e}", run.measured_c, run.measured_r);
    println!("global max |u| = {:e}", run.field.global_max());
    for c in &run.support.columns {
        println!("col x1={:+.2} max={:9.3e} err={:9.3e} {:?}", c.x1, c.max_abs, c.max_err, c.class);
    }
    // compare with v on strip
    let spec = run.contour.clone();
    let branch = puiseux_branch(&dec, 0, &spec).unwrap();
    let x1s = grid.x1_nodes(); let xds = grid.xd_nodes();
    let mut pts = vec![];
    let mut idx = vec![];
    for (i, &x1) in x1s.iter().enumerate() {
        if x1 > -1.0 + 1e-9 && x1 < -0.25 - 1e-9 {
            for (j, &xd) in xds.iter().enumerate() { pts.push([x1, xd]); idx.push((i,j)); }
        }
    }
    let v = hormander_v(&spec, &branch, &pts).unwrap();
    let vmax = v.iter().map(|(z,_)| z.norm()).fold(0.0, f64::max);
    let mut worst = 0.0f64; let mut worst_pt = [0.0,0.0];
    for (k, &(i,j)) in idx.iter().enumerate() {
        let u = run.field.values[i][j].0;
        let d = (u - v[k].0).norm();
        if d > worst { worst = d; worst_pt = pts[k]; }
    }
    println!("strip: max|v|={:e}, worst |u-v|={:e} at {:?} rel={:e}", vmax, worst, worst_pt, worst/vmax);
}
