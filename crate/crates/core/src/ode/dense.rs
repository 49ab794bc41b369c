use super::{Sample, State};

/// Cubic Hermite interpolant between two samples with stored derivatives.
pub fn hermite(a: &Sample, b: &Sample, s: f64) -> State {
    let h = b.s - a.s;
    if h == 0.0 {
        return [a.y[0], a.y[1], a.y[2]];
    }
    let th = (s - a.s) / h;
    let h00 = (1.0 + 2.0 * th) * (1.0 - th).powi(2);
    let h10 = th * (1.0 - th).powi(2);
    let h01 = th * th * (3.0 - 2.0 * th);
    let h11 = th * th * (th - 1.0);
    let mut out = [0.0; 3];
    for i in 0..3 {
        out[i] = h00 * a.y[i] + h10 * h * a.dy[i] + h01 * b.y[i] + h11 * h * b.dy[i];
    }
    out
}
