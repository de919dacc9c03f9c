//! Prints the twelve stencils and compares the isotropy of the Laplace kernels.

use curveflow::kernels::{anisotropy_score, exact_weights, kernel, ring_anisotropy, KernelName};

fn main() {
    for name in KernelName::ALL {
        println!("{name}");
        for row in exact_weights(name) {
            let cells: Vec<String> = row.iter().map(|w| format!("{w:>6}")).collect();
            println!("  {}", cells.join(" "));
        }
    }

    println!("\nring spread of |K(w)| (lower is more isotropic)");
    println!("kernel  r=pi/4   r=pi/2   r=3pi/4  max over radii");
    for name in KernelName::LAPLACE {
        let s = kernel(name);
        let ring = |r: f64| ring_anisotropy(&s, r, 720);
        println!(
            "{name:<6}  {:.4}   {:.4}   {:.4}   {:.4}",
            ring(std::f64::consts::FRAC_PI_4),
            ring(std::f64::consts::FRAC_PI_2),
            ring(3.0 * std::f64::consts::FRAC_PI_4),
            anisotropy_score(&s)
        );
    }
}
