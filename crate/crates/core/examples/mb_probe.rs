use lightmatter::couplings::{DriveProfile, EnsembleParams};
use lightmatter::mb::*;
use num_complex::Complex64;

fn main() {
    // what does the storage map actually look like vs the kernel?
    let p = EnsembleParams { d: 20.0, gamma: 1.0, delta: 0.0,
        rabi: DriveProfile::Constant(1.0), length: 1.0, ..Default::default() };
    let (nz, nt) = (112, 448);
    let t_total = 4.0_f64;
    // light impulse at t_j -> spin out
    let j = 176; // t = 1.571
    let mut g = PulseGrid::uniform(nz, nt, 1.0, t_total).unwrap();
    let mut light = vec![Complex64::default(); nt + 1];
    let dt = t_total / nt as f64;
    light[j] = Complex64::new(1.0 / dt, 0.0); // approximate delta in t
    g.light = light;
    let out = integrate_beam_splitter(&p, &g).unwrap();
    let t_j = g.ts[j];
    for i in [20usize, 56, 90] {
        let z = g.zs[i];
        let got = out.spin[i];
        let k1 = analytic_bs_kernel(&p, t_total - t_j, z).unwrap().value;
        let k2 = analytic_bs_kernel(&p, t_total - t_j, 1.0 - z).unwrap().value;
        println!("z={z:.3}: storage={:.4}{:+.4}i  m(T-t,z)={:.4}{:+.4}i  m(T-t,L-z)={:.4}{:+.4}i",
            got.re, got.im, k1.re, k1.im, k2.re, k2.im);
    }
}
