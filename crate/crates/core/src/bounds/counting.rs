//! Degrees-of-freedom counting and the minimal-size formula.

/// The two counting estimates and their minimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountingBound {
    pub copies: usize,
    /// `1 + ⌊(2 + (N+1)²)/3⌋`: smallest `n` with `3n − 3 ≥ (N+1)²`.
    pub general_bound: usize,
    /// `4 + 2⌊N/2⌋ + 2⌊(2/3)⌊N/2⌋²⌋`: smallest even `n` whose
    /// antipodal-pair reduction has at least as many unknowns as equations.
    pub antipodal_bound: usize,
    pub n_min: usize,
}

/// Conjectured minimal number of outcomes of an optimal POVM on `copies`
/// qubits.
pub fn n_min(copies: usize) -> CountingBound {
    let general_bound = 1 + ((copies + 1) * (copies + 1)).div_ceil(3);
    let h = copies / 2;
    let antipodal_bound = 4 + 2 * h + 2 * ((2 * h * h) / 3);
    CountingBound {
        copies,
        general_bound,
        antipodal_bound,
        n_min: general_bound.min(antipodal_bound),
    }
}

/// Independent moment equations at level `N`: `(N+1)²`.
pub fn equation_count(copies: usize) -> usize {
    (copies + 1) * (copies + 1)
}

/// Unknowns after fixing the rotational gauge: `3n − 3`.
pub fn unknown_count(outcomes: usize) -> usize {
    (3 * outcomes).saturating_sub(3)
}

/// Even-rank equations left when outcomes come in antipodal pairs:
/// `1 + 3⌊N/2⌋ + 2⌊N/2⌋²`.
pub fn antipodal_equation_count(copies: usize) -> usize {
    let h = copies / 2;
    1 + 3 * h + 2 * h * h
}

/// Unknowns of `n/2` antipodal pairs after gauge fixing: `3n/2 − 3`.
pub fn antipodal_unknown_count(outcomes: usize) -> usize {
    (3 * outcomes / 2).saturating_sub(3)
}
