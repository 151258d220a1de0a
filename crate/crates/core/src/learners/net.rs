/// Concatenation of the dyadic nets `A(2^-i) = {j 2^-i : 0 ≤ j ≤ 2^i}` for
/// `i = 1..=max_depth`, each in increasing order; points shared between
/// nets are repeated.
pub fn net_expert_sequence(max_depth: u32) -> Vec<f64> {
    assert!(max_depth <= 30, "net depth {max_depth} too large");
    let mut out = Vec::with_capacity(net_len_through(max_depth));
    for i in 1..=max_depth {
        let n = 1u64 << i;
        out.extend((0..=n).map(|j| j as f64 / n as f64));
    }
    out
}

/// Number of entries of the nets of depth `1..=i`: `Σ_{j≤i} (2^j + 1)`.
pub fn net_len_through(i: u32) -> usize {
    (1..=i).map(|j| (1usize << j) + 1).sum()
}

/// Enumeration index of the depth-`i` net point nearest to `a`.
pub fn nearest_net_index(a: f64, i: u32) -> usize {
    assert!((1..=30).contains(&i));
    let n = (1u64 << i) as f64;
    let j = (a.clamp(0.0, 1.0) * n).round() as usize;
    net_len_through(i - 1) + j
}
