//! Darcy-Weisbach pipe pressure drop with a smooth laminar/turbulent blend.

use crate::network::PipeAttrs;

const RE_LAMINAR: f64 = 2000.0;
const RE_TURBULENT: f64 = 3000.0;

/// Haaland friction factor and its derivative with respect to Re.
fn haaland(re: f64, rel_roughness: f64) -> (f64, f64) {
    let s = (rel_roughness / 3.7).powf(1.11) + 6.9 / re;
    let y = -1.8 * s.log10();
    let f = 1.0 / (y * y);
    let dy_ds = -1.8 / (s * std::f64::consts::LN_10);
    let ds_dre = -6.9 / (re * re);
    (f, -2.0 / (y * y * y) * dy_ds * ds_dre)
}

/// Darcy friction factor and d f / d Re for Re >= 2000.
pub fn friction_factor(re: f64, rel_roughness: f64) -> (f64, f64) {
    let (fl, dfl) = (64.0 / re, -64.0 / (re * re));
    if re <= RE_LAMINAR {
        return (fl, dfl);
    }
    let (ft, dft) = haaland(re, rel_roughness);
    if re >= RE_TURBULENT {
        return (ft, dft);
    }
    let s = (re - RE_LAMINAR) / (RE_TURBULENT - RE_LAMINAR);
    let w = s * s * (3.0 - 2.0 * s);
    let dw = 6.0 * s * (1.0 - s) / (RE_TURBULENT - RE_LAMINAR);
    ((1.0 - w) * fl + w * ft, (1.0 - w) * dfl + w * dft + dw * (ft - fl))
}

/// Pressure drop along the flow (Pa) and its derivative with respect to q.
///
/// Odd in `q`; linear (laminar) below the transition range so the slope at
/// zero flow is finite and non-zero.
pub fn pipe_pressure_drop(pipe: &PipeAttrs, q: f64, density: f64, viscosity: f64) -> (f64, f64) {
    let area = pipe.area();
    let d = pipe.diameter;
    let re_per_q = density * d / (viscosity * area);
    let re = re_per_q * q.abs();
    if re <= RE_LAMINAR {
        // Hagen-Poiseuille: Δp = 32 μ L v / d².
        let k = 32.0 * viscosity * pipe.length / (area * d * d);
        return (k * q, k);
    }
    let c = pipe.length * density / (2.0 * d * area * area);
    let (f, df) = friction_factor(re, pipe.roughness / d);
    let qa = q.abs();
    let dp = f * c * q * qa;
    let ddp = c * (df * re_per_q * q * q + 2.0 * f * qa);
    (dp, ddp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pipe() -> PipeAttrs {
        PipeAttrs { length: 250.0, diameter: 0.1, roughness: 4.5e-5, u_loss: 0.3 }
    }

    #[test]
    fn continuous_at_blend_edges() {
        for re in [RE_LAMINAR, RE_TURBULENT] {
            let lo = friction_factor(re - 1e-7, 1e-4);
            let hi = friction_factor(re + 1e-7, 1e-4);
            assert_relative_eq!(lo.0, hi.0, max_relative = 1e-8);
            assert_relative_eq!(lo.1, hi.1, max_relative = 1e-5);
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let p = pipe();
        for q in [1e-5f64, 3e-4, 5e-4, 7e-4, 2e-3, 0.02, -0.01] {
            let h = q.abs() * 1e-6;
            let fd = (pipe_pressure_drop(&p, q + h, 983.0, 4.7e-4).0 - pipe_pressure_drop(&p, q - h, 983.0, 4.7e-4).0)
                / (2.0 * h);
            assert_relative_eq!(pipe_pressure_drop(&p, q, 983.0, 4.7e-4).1, fd, max_relative = 1e-6);
        }
    }

    #[test]
    fn turbulent_drop_matches_hand_calculation() {
        // Oracle: explicit Haaland evaluation.
        let p = pipe();
        let q = 0.01;
        let v = q / (std::f64::consts::PI * 0.05 * 0.05);
        let re = 983.0 * v * 0.1 / 4.7e-4;
        let inv_sqrt_f = -1.8 * ((4.5e-4f64 / 3.7).powf(1.11) + 6.9 / re).log10();
        let f = 1.0 / (inv_sqrt_f * inv_sqrt_f);
        let dp = f * (250.0 / 0.1) * 983.0 * v * v / 2.0;
        assert_relative_eq!(pipe_pressure_drop(&p, q, 983.0, 4.7e-4).0, dp, max_relative = 1e-12);
    }
}
