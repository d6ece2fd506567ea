//! Haar unitaries from QR of Ginibre matrices, and the seeded stream scheme.

use unigraph::sampling::{haar_unitary, random_phases, RandomStream};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 8;
    let draws = 2000;
    let mut mean_sq = 0.0;
    let mut trace_sq = 0.0;
    let mut worst = 0.0f64;
    for t in 0..draws {
        let u = haar_unitary(n, RandomStream::new(2024, t))?;
        worst = worst.max(u.unitarity_defect());
        mean_sq += u.get(0, 0).norm_sqr();
        trace_sq += (0..n).map(|i| u.get(i, i)).sum::<unigraph::c64>().norm_sqr();
    }
    println!("N={n}, {draws} draws");
    println!("max unitarity defect      {worst:.2e}");
    println!("E|U_00|^2 = {:.4}  (1/N = {:.4})", mean_sq / draws as f64, 1.0 / n as f64);
    println!("E|Tr U|^2 = {:.4}  (exact 1)", trace_sq / draws as f64);

    // same (seed, index) always gives the same matrix; children are independent
    let s = RandomStream::new(7, 0);
    let a = haar_unitary(3, s)?;
    let b = haar_unitary(3, s)?;
    let c = haar_unitary(3, s.child(1))?;
    println!("reproducible: {}", a == b);
    println!("child differs: {}", a != c);
    println!("uniform phases: {:.3?}", random_phases(4, s.child(2))?);
    Ok(())
}
