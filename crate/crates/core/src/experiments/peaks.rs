//! Local maxima and their topographic prominence.
//!
//! The window edges are treated as an empty-coil floor (the smaller of zero and
//! the series minimum), so a rise that never falls back inside the window still
//! counts as fully prominent. Endpoints are eligible maxima.

/// Prominence of the local maximum at `i`.
pub fn prominence(values: &[f64], i: usize) -> f64 {
    let floor = values.iter().copied().fold(0.0f64, f64::min);
    let h = values[i];
    let left = values[..i]
        .iter()
        .rev()
        .take_while(|&&v| v <= h)
        .copied()
        .fold(f64::INFINITY, f64::min);
    let left_base = if values[..i].iter().any(|&v| v > h) { left } else { left.min(floor) };
    let right = values[i + 1..]
        .iter()
        .take_while(|&&v| v <= h)
        .copied()
        .fold(f64::INFINITY, f64::min);
    let right_base = if values[i + 1..].iter().any(|&v| v > h) { right } else { right.min(floor) };
    h - left_base.max(right_base)
}

/// Indices of local maxima (first sample of a plateau) in ascending order.
pub fn local_maxima(values: &[f64]) -> Vec<usize> {
    let n = values.len();
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[j + 1] == values[i] {
            j += 1;
        }
        let rises = i == 0 || values[i - 1] < values[i];
        let falls = j + 1 == n || values[j + 1] < values[i];
        if rises && falls && !(i == 0 && j + 1 == n) {
            out.push(i);
        }
        i = j + 1;
    }
    out
}

/// Local maxima whose prominence exceeds `min_prominence`.
pub fn prominent_maxima(values: &[f64], min_prominence: f64) -> Vec<usize> {
    local_maxima(values)
        .into_iter()
        .filter(|&i| prominence(values, i) > min_prominence)
        .collect()
}
