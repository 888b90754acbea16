//! Small numeric helpers shared by the mitigation and tomography code.

use alloc::vec::Vec;

/// Euclidean projection of `v` onto the probability simplex
/// `{p : p_i >= 0, sum p_i = 1}`.
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut shift = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let t = (cumulative - 1.0) / (k + 1) as f64;
        if u - t > 0.0 {
            shift = t;
        }
    }
    v.iter().map(|&x| (x - shift).max(0.0)).collect()
}

/// SplitMix64 finalizer over `root` and `parts`, for per-task seeds.
pub fn derive_seed(root: u64, parts: &[u64]) -> u64 {
    let mix = |mut z: u64| {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    };
    parts.iter().fold(mix(root), |acc, &p| mix(acc ^ mix(p)))
}
