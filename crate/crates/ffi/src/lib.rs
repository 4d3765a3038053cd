//! C ABI over the entanglekit library.
//!
//! Objects cross the boundary as opaque handles created by `ek_*_new`/`ek_*_read`/`ek_*_fit`
//! and released with the matching `ek_*_free`. Every fallible call returns an [`EkStatus`];
//! on failure `ek_last_error` describes what went wrong on the calling thread.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use entanglekit::data::{average_canonical_entanglement, entanglement, sample_size_bound, Dataset};
use entanglekit::rearrange::{rearrange_pdim, CutOptions};
use entanglekit::surrogate::surrogate_entanglement;
use entanglekit::tree_tn::{fit_hierarchical, TreeTensorNetwork, DEFAULT_MEMORY_BUDGET};
use entanglekit::{io, AxisPartition, CompatibleMap, DenseTensor, Error};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EkStatus {
    Ok = 0,
    InvalidArgument = 1,
    Parse = 2,
    Precondition = 3,
    Capacity = 4,
    Numeric = 5,
    Io = 6,
    NullPointer = 7,
    Panic = 8,
}

/// Dense tensor handle.
pub struct EkTensor(DenseTensor);

/// Dataset handle.
pub struct EkDataset(Dataset);

/// Tree tensor network handle.
pub struct EkNetwork(TreeTensorNetwork);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> EkStatus {
    match e {
        Error::Shape(_) | Error::Partition(_) | Error::Argument(_) => EkStatus::InvalidArgument,
        Error::Parse { .. } | Error::Format(_) | Error::Json(_) => EkStatus::Parse,
        Error::Precondition(_) | Error::Degenerate(_) | Error::DegenerateFeature { .. } => {
            EkStatus::Precondition
        }
        Error::Capacity { .. } => EkStatus::Capacity,
        Error::Numeric(_) => EkStatus::Numeric,
        Error::Io(_) => EkStatus::Io,
    }
}

enum Failure {
    Lib(Error),
    Null(&'static str),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = std::result::Result<(), Failure>;

fn guard(f: impl FnOnce() -> Outcome) -> EkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            EkStatus::Ok
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            EkStatus::NullPointer
        }
        Err(_) => {
            set_error("internal panic".into());
            EkStatus::Panic
        }
    }
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &'static str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn handle<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(what))
}

unsafe fn path<'a>(p: *const c_char) -> Result<&'a Path, Failure> {
    if p.is_null() {
        return Err(Failure::Null("path"));
    }
    let s = CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Error::Argument("path is not valid UTF-8".into()))?;
    Ok(Path::new(s))
}

fn partition(n: usize, subset: &[usize]) -> Result<AxisPartition, Failure> {
    Ok(AxisPartition::new(n, subset.iter().copied())?)
}

/// Message for the last failed call on this thread, or null. Valid until the next call.
#[no_mangle]
pub extern "C" fn ek_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Creates a tensor from row-major data.
#[no_mangle]
pub unsafe extern "C" fn ek_tensor_new(
    dims: *const usize,
    ndim: usize,
    data: *const f64,
    len: usize,
    result: *mut *mut EkTensor,
) -> EkStatus {
    guard(|| {
        let dims = slice(dims, ndim, "dims")?.to_vec();
        let data = slice(data, len, "data")?.to_vec();
        let slot = out(result, "result")?;
        *slot = Box::into_raw(Box::new(EkTensor(DenseTensor::new(dims, data)?)));
        Ok(())
    })
}

/// Reads a tensor from the binary tensor format.
#[no_mangle]
pub unsafe extern "C" fn ek_tensor_read(
    file: *const c_char,
    result: *mut *mut EkTensor,
) -> EkStatus {
    guard(|| {
        let t = io::read_tensor(path(file)?)?;
        *out(result, "result")? = Box::into_raw(Box::new(EkTensor(t)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ek_tensor_write(tensor: *const EkTensor, file: *const c_char) -> EkStatus {
    guard(|| {
        io::write_tensor(path(file)?, &handle(tensor, "tensor")?.0)?;
        Ok(())
    })
}

/// Number of axes; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn ek_tensor_ndim(tensor: *const EkTensor) -> usize {
    tensor.as_ref().map_or(0, |t| t.0.ndim())
}

#[no_mangle]
pub unsafe extern "C" fn ek_tensor_norm(tensor: *const EkTensor, result: *mut f64) -> EkStatus {
    guard(|| {
        *out(result, "result")? = handle(tensor, "tensor")?.0.norm();
        Ok(())
    })
}

/// Copies the row-major entries into `buffer`, which must hold exactly the tensor's size.
#[no_mangle]
pub unsafe extern "C" fn ek_tensor_data(
    tensor: *const EkTensor,
    buffer: *mut f64,
    len: usize,
) -> EkStatus {
    guard(|| {
        let t = &handle(tensor, "tensor")?.0;
        if len != t.len() {
            return Err(Error::Shape(format!("buffer holds {len}, tensor has {}", t.len())).into());
        }
        if buffer.is_null() {
            return Err(Failure::Null("buffer"));
        }
        std::slice::from_raw_parts_mut(buffer, len).copy_from_slice(t.data());
        Ok(())
    })
}

/// Entanglement (nats) of the tensor with respect to the axis subset.
#[no_mangle]
pub unsafe extern "C" fn ek_tensor_entanglement(
    tensor: *const EkTensor,
    subset: *const usize,
    subset_len: usize,
    result: *mut f64,
) -> EkStatus {
    guard(|| {
        let t = &handle(tensor, "tensor")?.0;
        let part = partition(t.ndim(), slice(subset, subset_len, "subset")?)?;
        *out(result, "result")? = t.entanglement(&part)?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ek_tensor_free(tensor: *mut EkTensor) {
    if !tensor.is_null() {
        drop(Box::from_raw(tensor));
    }
}

/// Creates a dataset from `features[(m * n_features + n) * feature_dim + d]`. `labels` may be
/// null for an unlabeled dataset; otherwise it holds one ±1 value per instance.
#[no_mangle]
pub unsafe extern "C" fn ek_dataset_new(
    n_features: usize,
    feature_dim: usize,
    spatial_dim: usize,
    features: *const f64,
    len: usize,
    labels: *const f64,
    n_labels: usize,
    result: *mut *mut EkDataset,
) -> EkStatus {
    guard(|| {
        let features = slice(features, len, "features")?.to_vec();
        let labels = if labels.is_null() {
            None
        } else {
            Some(slice(labels, n_labels, "labels")?.to_vec())
        };
        let ds = Dataset::new(n_features, feature_dim, spatial_dim, features, labels)?;
        *out(result, "result")? = Box::into_raw(Box::new(EkDataset(ds)));
        Ok(())
    })
}

/// Reads a dataset CSV together with its `.json` sidecar.
#[no_mangle]
pub unsafe extern "C" fn ek_dataset_read(
    csv: *const c_char,
    result: *mut *mut EkDataset,
) -> EkStatus {
    guard(|| {
        let loaded = io::read_dataset(path(csv)?, None)?;
        *out(result, "result")? = Box::into_raw(Box::new(EkDataset(loaded.dataset)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ek_dataset_n_features(ds: *const EkDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.0.n_features())
}

/// New dataset with every scalar replaced by its sine-cosine embedding.
#[no_mangle]
pub unsafe extern "C" fn ek_dataset_embed_sincos(
    ds: *const EkDataset,
    theta: f64,
    result: *mut *mut EkDataset,
) -> EkStatus {
    guard(|| {
        if !theta.is_finite() {
            return Err(Error::Argument("theta must be finite".into()).into());
        }
        let embedded = handle(ds, "dataset")?.0.embed_sincos(theta);
        *out(result, "result")? = Box::into_raw(Box::new(EkDataset(embedded)));
        Ok(())
    })
}

/// Entanglement of the empirical data tensor for a subset of feature indices.
#[no_mangle]
pub unsafe extern "C" fn ek_dataset_entanglement(
    ds: *const EkDataset,
    subset: *const usize,
    subset_len: usize,
    result: *mut f64,
) -> EkStatus {
    guard(|| {
        let d = &handle(ds, "dataset")?.0;
        let part = partition(d.n_features(), slice(subset, subset_len, "subset")?)?;
        *out(result, "result")? = entanglement(d, &part)?;
        Ok(())
    })
}

/// Mean entanglement over canonical partitions at levels `lo..=hi`.
#[no_mangle]
pub unsafe extern "C" fn ek_dataset_average_entanglement(
    ds: *const EkDataset,
    lo: u32,
    hi: u32,
    result: *mut f64,
) -> EkStatus {
    guard(|| {
        *out(result, "result")? =
            average_canonical_entanglement(&handle(ds, "dataset")?.0, lo, hi)?;
        Ok(())
    })
}

/// Sum of multivariate Pearson correlations across the feature bipartition.
#[no_mangle]
pub unsafe extern "C" fn ek_dataset_surrogate_entanglement(
    ds: *const EkDataset,
    subset: *const usize,
    subset_len: usize,
    result: *mut f64,
) -> EkStatus {
    guard(|| {
        let d = &handle(ds, "dataset")?.0;
        let part = partition(d.n_features(), slice(subset, subset_len, "subset")?)?;
        *out(result, "result")? = surrogate_entanglement(d, &part)?;
        Ok(())
    })
}

/// Rearranges features; writes the target position of every feature into `pi`, which must
/// have one slot per feature.
#[no_mangle]
pub unsafe extern "C" fn ek_dataset_rearrange(
    ds: *const EkDataset,
    seed: u64,
    restarts: usize,
    pi: *mut usize,
    pi_len: usize,
) -> EkStatus {
    guard(|| {
        let d = &handle(ds, "dataset")?.0;
        if pi_len != d.n_features() {
            return Err(Error::Shape(format!(
                "pi holds {pi_len}, dataset has {} features",
                d.n_features()
            ))
            .into());
        }
        if pi.is_null() {
            return Err(Failure::Null("pi"));
        }
        let opts = CutOptions {
            seed,
            restarts,
            ..Default::default()
        };
        let perm = rearrange_pdim(d, &opts)?;
        std::slice::from_raw_parts_mut(pi, pi_len).copy_from_slice(perm.as_slice());
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ek_dataset_free(ds: *mut EkDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// Fits a width-`width` tree network to a tensor whose axes form a `dim`-dimensional grid.
/// `achieved_error` may be null.
#[no_mangle]
pub unsafe extern "C" fn ek_network_fit(
    tensor: *const EkTensor,
    width: usize,
    dim: usize,
    result: *mut *mut EkNetwork,
    achieved_error: *mut f64,
) -> EkStatus {
    guard(|| {
        let t = &handle(tensor, "tensor")?.0;
        if dim == 0 {
            return Err(Error::Argument("dim must be positive".into()).into());
        }
        let n = t.ndim();
        let side = (n as f64).powf(1.0 / dim as f64).round() as usize;
        if side.checked_pow(dim as u32) != Some(n) {
            return Err(
                Error::Shape(format!("{n} axes do not form a {dim}-dimensional grid")).into(),
            );
        }
        let map = CompatibleMap::new(side, dim)?;
        let fit = fit_hierarchical(t, width, &map, DEFAULT_MEMORY_BUDGET)?;
        if let Some(e) = achieved_error.as_mut() {
            *e = fit.achieved_error;
        }
        *out(result, "result")? = Box::into_raw(Box::new(EkNetwork(fit.network)));
        Ok(())
    })
}

/// Inner product of the network with `x_1 (x) .. (x) x_n`; `inputs` concatenates the vectors
/// in axis order.
#[no_mangle]
pub unsafe extern "C" fn ek_network_forward(
    net: *const EkNetwork,
    inputs: *const f64,
    len: usize,
    result: *mut f64,
) -> EkStatus {
    guard(|| {
        let net = &handle(net, "network")?.0;
        let flat = slice(inputs, len, "inputs")?;
        let total: usize = net.dims().iter().sum();
        if len != total {
            return Err(Error::Shape(format!("{len} inputs, network expects {total}")).into());
        }
        let mut vectors = Vec::with_capacity(net.dims().len());
        let mut at = 0;
        for &d in net.dims() {
            vectors.push(flat[at..at + d].to_vec());
            at += d;
        }
        *out(result, "result")? = net.forward(&vectors)?;
        Ok(())
    })
}

/// Contracts the network into a dense tensor.
#[no_mangle]
pub unsafe extern "C" fn ek_network_contract(
    net: *const EkNetwork,
    result: *mut *mut EkTensor,
) -> EkStatus {
    guard(|| {
        let t = handle(net, "network")?
            .0
            .contract_full(DEFAULT_MEMORY_BUDGET)?;
        *out(result, "result")? = Box::into_raw(Box::new(EkTensor(t)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ek_network_free(net: *mut EkNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// Training-set size bound; see the library documentation for the formula.
#[no_mangle]
pub unsafe extern "C" fn ek_sample_size_bound(
    delta: f64,
    gamma: f64,
    pop_norm_lower: f64,
    max_log_dim: f64,
    result: *mut u64,
) -> EkStatus {
    guard(|| {
        *out(result, "result")? = sample_size_bound(delta, gamma, pop_norm_lower, max_log_dim)?;
        Ok(())
    })
}
