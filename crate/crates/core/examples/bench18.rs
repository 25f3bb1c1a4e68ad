use exciton_vqe::mcvqe::{McVqe, McVqeConfig};
use exciton_vqe::synth::{generate, SynthSpec};
use std::time::Instant;

fn main() {
    let spec = SynthSpec::ring_defaults(18, 7);
    let (monomers, conn) = generate(&spec).unwrap();
    let t0 = Instant::now();
    let vqe = McVqe::new(&monomers, &conn, McVqeConfig::default()).unwrap();
    println!("setup (CIS + plan + 19 preparations): {:?}", t0.elapsed());
    let (f, x0) = vqe.objective().unwrap();
    println!("n_params = {}", x0.len());
    let t1 = Instant::now();
    let e0 = f(&x0);
    println!("one objective evaluation: {:?}  Ē = {e0:.12}", t1.elapsed());
    let t2 = Instant::now();
    let e1 = f(&vec![0.01; x0.len()]);
    println!("second evaluation: {:?}  Ē = {e1:.12}", t2.elapsed());
    // One full fd gradient = 2*108 evaluations
    let t3 = Instant::now();
    let g = exciton_vqe::numerics::fd_gradient(&f, &x0, 0.01);
    let gmax = g.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    println!("fd gradient (216 evals): {:?}  max|g| = {gmax:.3e}", t3.elapsed());
}
