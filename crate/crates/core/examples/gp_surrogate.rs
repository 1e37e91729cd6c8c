//! Kriging fit on a handful of camel back samples: fitted length scales and
//! the predictive band along a slice.

use tcheby_mobo::gp::{fit_gp, GpConfig};
use tcheby_mobo::problems::camelback;

fn main() -> tcheby_mobo::Result<()> {
    let x: Vec<Vec<f64>> = [-2.5, -1.5, -0.5, 0.4, 1.2, 2.0, 2.8]
        .iter()
        .flat_map(|&a| [-1.5, 0.5, 1.6].map(|b| vec![a, b]))
        .collect();
    let y: Vec<f64> = x.iter().map(|p| camelback(p[0], p[1])).collect();
    let fit = fit_gp(&x, &y, &GpConfig::default())?;
    let h = fit.hyper();
    println!("theta {:?}, process variance {:.4}, nugget {:e}, trend {:?}", h.theta, h.sigma2, h.nugget, fit.trend_order());
    println!("\n    x1    truth     mean      sd");
    for i in 0..=12 {
        let a = -3.0 + 0.5 * i as f64;
        let (m, mse) = fit.predict(&[a, 0.5])?;
        println!("{a:>6.2} {:>8.3} {m:>8.3} {:>7.3}", camelback(a, 0.5), mse.sqrt());
    }
    Ok(())
}
