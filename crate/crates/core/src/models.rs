//! Registry of built-in models, shared by the CLI, the FFI layer and tests.

use crate::error::{Error, Result};
use crate::lattice::{build_chain, build_ho2, build_ring, HamiltonianFamily};

/// Named built-ins with one-line descriptions. `ring{n}`/`chain{n}` accept any
/// valid size.
pub const BUILTIN_MODELS: &[(&str, &str)] = &[
    (
        "ring4",
        "periodic 4-site ring, alternating gain/loss (+1, -1, +1, -1)",
    ),
    (
        "chain4",
        "open 4-site chain, alternating gain/loss (+1, -1, +1, -1)",
    ),
    (
        "ho2",
        "open 4-site chain relabeled: edges 0-2, 1-2, 1-3, signature (+1, +1, -1, -1)",
    ),
    (
        "ring{n}",
        "periodic ring of n sites (n even, n >= 4), alternating gain/loss",
    ),
    (
        "chain{n}",
        "open chain of n sites (n >= 2), alternating gain/loss",
    ),
];

/// Resolves a built-in name such as `ring4`, `chain7` or `ho2`.
pub fn resolve_model(name: &str) -> Result<HamiltonianFamily> {
    if name == "ho2" {
        return Ok(build_ho2());
    }
    let sized = |prefix: &str| -> Option<usize> {
        let digits = name.strip_prefix(prefix)?;
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        digits.parse().ok()
    };
    if let Some(n) = sized("ring") {
        return build_ring(n);
    }
    if let Some(n) = sized("chain") {
        return build_chain(n);
    }
    Err(Error::UnknownModel(name.to_string()))
}
