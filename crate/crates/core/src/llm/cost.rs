use super::Usage;

/// Price per million tokens.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Price {
    pub input_per_m: f64,
    pub output_per_m: f64,
}

/// Total spend for `usage`. Without a price the cost is unknown and `None`
/// is returned after a warning.
pub fn estimate_cost(usage: &[Usage], price: Option<Price>) -> Option<f64> {
    let Some(p) = price else {
        if usage.iter().any(|u| u.input_tokens + u.output_tokens > 0) {
            log::warn!("no price configured; API cost for {} usage records omitted", usage.len());
        }
        return None;
    };
    Some(
        usage
            .iter()
            .map(|u| (u.input_tokens as f64 * p.input_per_m + u.output_tokens as f64 * p.output_per_m) / 1e6)
            .sum(),
    )
}
