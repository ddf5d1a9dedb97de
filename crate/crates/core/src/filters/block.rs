use crate::error::Result;
use crate::filters::{AdaptiveFilter, WeightVector};
use crate::signal::Signal;

/// Result of running a filter over a block.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockOutput {
    /// `e(n)` for every sample: the denoised estimate in a canceller.
    pub error: Signal,
    /// Weights after the update at each requested sample index, in the
    /// order requested. Indices past the end are skipped.
    pub snapshots: Vec<(usize, WeightVector)>,
}

/// Folds [`AdaptiveFilter::process_sample`] over a block.
///
/// Divergence faults propagate with the index of the offending sample,
/// counted from the filter's first processed sample.
pub fn process_block<F: AdaptiveFilter + ?Sized>(
    filter: &mut F,
    desired: &Signal,
    reference: &Signal,
    snapshot_at: &[usize],
) -> Result<BlockOutput> {
    desired.check_compatible(reference)?;
    let mut wanted: Vec<(usize, usize)> = snapshot_at
        .iter()
        .enumerate()
        .filter(|(_, &i)| i < desired.len())
        .map(|(slot, &i)| (i, slot))
        .collect();
    wanted.sort_unstable();
    let mut wanted = wanted.into_iter().peekable();
    let mut snapshots: Vec<(usize, usize, WeightVector)> = Vec::with_capacity(snapshot_at.len());

    let mut error = Vec::with_capacity(desired.len());
    for (n, (&d, &x)) in desired
        .samples()
        .iter()
        .zip(reference.samples())
        .enumerate()
    {
        let step = filter.process_sample(d, x)?;
        error.push(step.error);
        while let Some(&(i, slot)) = wanted.peek() {
            if i != n {
                break;
            }
            snapshots.push((slot, i, filter.weights().clone()));
            wanted.next();
        }
    }
    snapshots.sort_unstable_by_key(|(slot, _, _)| *slot);
    Ok(BlockOutput {
        error: Signal::new(error, desired.sample_rate())?,
        snapshots: snapshots.into_iter().map(|(_, i, w)| (i, w)).collect(),
    })
}
