//! Dense row-major tensors and the binary container used to persist them.
//!
//! Training runs at `f32`; gradient checks instantiate the same code at
//! `f64`. The [`Scalar`] trait abstracts over the two.

use std::fmt;
use std::io::{self, Read, Write};

use thiserror::Error;

/// Floating-point scalar usable by every layer implementation.
pub trait Scalar:
    num_traits::Float
    + std::ops::AddAssign
    + std::ops::SubAssign
    + std::ops::MulAssign
    + std::iter::Sum
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
{
    fn from_f64(v: f64) -> Self;
    fn into_f64(self) -> f64;

    /// C := alpha * A * B + beta * C over raw strided buffers.
    ///
    /// # Safety
    /// Pointers must cover the strided extents implied by (m, k, n).
    #[allow(clippy::too_many_arguments)]
    unsafe fn gemm_raw(
        m: usize,
        k: usize,
        n: usize,
        alpha: Self,
        a: *const Self,
        rsa: isize,
        csa: isize,
        b: *const Self,
        rsb: isize,
        csb: isize,
        beta: Self,
        c: *mut Self,
        rsc: isize,
        csc: isize,
    );
}

impl Scalar for f32 {
    fn from_f64(v: f64) -> Self {
        v as f32
    }
    fn into_f64(self) -> f64 {
        self as f64
    }
    unsafe fn gemm_raw(
        m: usize,
        k: usize,
        n: usize,
        alpha: Self,
        a: *const Self,
        rsa: isize,
        csa: isize,
        b: *const Self,
        rsb: isize,
        csb: isize,
        beta: Self,
        c: *mut Self,
        rsc: isize,
        csc: isize,
    ) {
        matrixmultiply::sgemm(m, k, n, alpha, a, rsa, csa, b, rsb, csb, beta, c, rsc, csc)
    }
}

impl Scalar for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn into_f64(self) -> f64 {
        self
    }
    unsafe fn gemm_raw(
        m: usize,
        k: usize,
        n: usize,
        alpha: Self,
        a: *const Self,
        rsa: isize,
        csa: isize,
        b: *const Self,
        rsb: isize,
        csb: isize,
        beta: Self,
        c: *mut Self,
        rsc: isize,
        csc: isize,
    ) {
        matrixmultiply::dgemm(m, k, n, alpha, a, rsa, csa, b, rsb, csb, beta, c, rsc, csc)
    }
}

/// Dense row-major tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor<T> {
    shape: Vec<usize>,
    data: Vec<T>,
}

impl<T: Scalar> Tensor<T> {
    pub fn zeros(shape: &[usize]) -> Self {
        let len = shape.iter().product();
        Tensor {
            shape: shape.to_vec(),
            data: vec![T::zero(); len],
        }
    }

    pub fn from_vec(shape: &[usize], data: Vec<T>) -> Self {
        assert_eq!(
            shape.iter().product::<usize>(),
            data.len(),
            "shape {:?} does not match data length {}",
            shape,
            data.len()
        );
        Tensor {
            shape: shape.to_vec(),
            data,
        }
    }

    pub fn filled(shape: &[usize], value: T) -> Self {
        let len = shape.iter().product();
        Tensor {
            shape: shape.to_vec(),
            data: vec![value; len],
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    /// Reinterpret the shape without touching the data (element count must match).
    pub fn reshaped(mut self, shape: &[usize]) -> Self {
        assert_eq!(
            shape.iter().product::<usize>(),
            self.data.len(),
            "reshape {:?} incompatible with {} elements",
            shape,
            self.data.len()
        );
        self.shape = shape.to_vec();
        self
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Tensor {
            shape: self.shape.clone(),
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn cast<U: Scalar>(&self) -> Tensor<U> {
        Tensor {
            shape: self.shape.clone(),
            data: self.data.iter().map(|&v| U::from_f64(v.into_f64())).collect(),
        }
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.data.iter()
    }

    /// Row slice of a 2-d tensor.
    pub fn row(&self, r: usize) -> &[T] {
        debug_assert_eq!(self.shape.len(), 2);
        let cols = self.shape[1];
        &self.data[r * cols..(r + 1) * cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [T] {
        debug_assert_eq!(self.shape.len(), 2);
        let cols = self.shape[1];
        &mut self.data[r * cols..(r + 1) * cols]
    }

    /// 2-d element accessor.
    pub fn at2(&self, r: usize, c: usize) -> T {
        debug_assert_eq!(self.shape.len(), 2);
        self.data[r * self.shape[1] + c]
    }

    /// 3-d element accessor.
    pub fn at3(&self, i: usize, j: usize, k: usize) -> T {
        debug_assert_eq!(self.shape.len(), 3);
        self.data[(i * self.shape[1] + j) * self.shape[2] + k]
    }

    pub fn max_abs(&self) -> f64 {
        self.data
            .iter()
            .map(|v| v.into_f64().abs())
            .fold(0.0, f64::max)
    }
}

/// Whether `a` and `b` are 2-d views that should be transposed inside [`gemm`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trans {
    No,
    Yes,
}

/// C := alpha * op(A) * op(B) + beta * C for 2-d tensors.
pub fn gemm<T: Scalar>(
    alpha: T,
    a: &Tensor<T>,
    ta: Trans,
    b: &Tensor<T>,
    tb: Trans,
    beta: T,
    c: &mut Tensor<T>,
) {
    let (am, ak) = (a.shape[0], a.shape[1]);
    let (bm, bk) = (b.shape[0], b.shape[1]);
    let (m, k) = match ta {
        Trans::No => (am, ak),
        Trans::Yes => (ak, am),
    };
    let (kb, n) = match tb {
        Trans::No => (bm, bk),
        Trans::Yes => (bk, bm),
    };
    assert_eq!(k, kb, "gemm inner dimensions disagree");
    assert_eq!(c.shape, [m, n], "gemm output shape mismatch");

    let (rsa, csa) = match ta {
        Trans::No => (ak as isize, 1),
        Trans::Yes => (1, ak as isize),
    };
    let (rsb, csb) = match tb {
        Trans::No => (bk as isize, 1),
        Trans::Yes => (1, bk as isize),
    };
    unsafe {
        T::gemm_raw(
            m,
            k,
            n,
            alpha,
            a.data.as_ptr(),
            rsa,
            csa,
            b.data.as_ptr(),
            rsb,
            csb,
            beta,
            c.data.as_mut_ptr(),
            n as isize,
            1,
        );
    }
}

/// Strided gemm where A is a row-block of a 3-d tensor `[batch, time, dim]`
/// taken at one timestep: logical shape `[batch, dim]`, row stride `time*dim`.
#[allow(clippy::too_many_arguments)]
pub fn gemm_timestep<T: Scalar>(
    alpha: T,
    x: &Tensor<T>,
    t: usize,
    w: &Tensor<T>,
    beta: T,
    c: &mut Tensor<T>,
) {
    let (batch, time, dim) = (x.shape[0], x.shape[1], x.shape[2]);
    let (wk, wn) = (w.shape[0], w.shape[1]);
    assert_eq!(dim, wk);
    assert_eq!(c.shape, [batch, wn]);
    assert!(t < time);
    unsafe {
        T::gemm_raw(
            batch,
            dim,
            wn,
            alpha,
            x.data.as_ptr().add(t * dim),
            (time * dim) as isize,
            1,
            w.data.as_ptr(),
            wn as isize,
            1,
            beta,
            c.data.as_mut_ptr(),
            wn as isize,
            1,
        );
    }
}

// ---------------------------------------------------------------------------
// Named-tensor container (versioned, little-endian f32)
// ---------------------------------------------------------------------------

const CONTAINER_MAGIC: &[u8; 4] = b"TNSR";
const CONTAINER_VERSION: u16 = 1;

/// Errors from reading or writing the binary tensor container.
#[derive(Debug, Error)]
pub enum ContainerError {
    #[error("bad magic bytes; not a tensor container")]
    BadMagic,
    #[error("unsupported container version {0} (expected {CONTAINER_VERSION})")]
    Version(u16),
    #[error("truncated file: {0}")]
    Truncated(&'static str),
    #[error("io error: {0}")]
    Io(#[from] io::Error),
}

/// Write named f32 tensors as a versioned little-endian container.
pub fn write_container<W: Write>(
    mut w: W,
    entries: &[(String, &Tensor<f32>)],
) -> Result<(), ContainerError> {
    w.write_all(CONTAINER_MAGIC)?;
    w.write_all(&CONTAINER_VERSION.to_le_bytes())?;
    w.write_all(&(entries.len() as u32).to_le_bytes())?;
    for (name, tensor) in entries {
        let name_bytes = name.as_bytes();
        w.write_all(&(name_bytes.len() as u16).to_le_bytes())?;
        w.write_all(name_bytes)?;
        w.write_all(&(tensor.shape().len() as u8).to_le_bytes())?;
        for &d in tensor.shape() {
            w.write_all(&(d as u32).to_le_bytes())?;
        }
        for &v in tensor.data() {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

/// Read a container written by [`write_container`], preserving entry order.
pub fn read_container<R: Read>(mut r: R) -> Result<Vec<(String, Tensor<f32>)>, ContainerError> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)
        .map_err(|_| ContainerError::Truncated("magic"))?;
    if &magic != CONTAINER_MAGIC {
        return Err(ContainerError::BadMagic);
    }
    let mut buf2 = [0u8; 2];
    r.read_exact(&mut buf2)
        .map_err(|_| ContainerError::Truncated("version"))?;
    let version = u16::from_le_bytes(buf2);
    if version != CONTAINER_VERSION {
        return Err(ContainerError::Version(version));
    }
    let mut buf4 = [0u8; 4];
    r.read_exact(&mut buf4)
        .map_err(|_| ContainerError::Truncated("entry count"))?;
    let count = u32::from_le_bytes(buf4) as usize;

    let mut entries = Vec::with_capacity(count);
    for _ in 0..count {
        r.read_exact(&mut buf2)
            .map_err(|_| ContainerError::Truncated("name length"))?;
        let name_len = u16::from_le_bytes(buf2) as usize;
        let mut name_bytes = vec![0u8; name_len];
        r.read_exact(&mut name_bytes)
            .map_err(|_| ContainerError::Truncated("name"))?;
        let name = String::from_utf8_lossy(&name_bytes).into_owned();

        let mut buf1 = [0u8; 1];
        r.read_exact(&mut buf1)
            .map_err(|_| ContainerError::Truncated("rank"))?;
        let ndim = buf1[0] as usize;
        let mut shape = Vec::with_capacity(ndim);
        for _ in 0..ndim {
            r.read_exact(&mut buf4)
                .map_err(|_| ContainerError::Truncated("shape"))?;
            shape.push(u32::from_le_bytes(buf4) as usize);
        }
        let len: usize = shape.iter().product();
        let mut data = Vec::with_capacity(len);
        for _ in 0..len {
            r.read_exact(&mut buf4)
                .map_err(|_| ContainerError::Truncated("tensor data"))?;
            data.push(f32::from_le_bytes(buf4));
        }
        entries.push((name, Tensor::from_vec(&shape, data)));
    }
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gemm_matches_hand_computation() {
        // [2x3] * [3x2]
        let a = Tensor::from_vec(&[2, 3], vec![1.0f64, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let b = Tensor::from_vec(&[3, 2], vec![7.0, 8.0, 9.0, 10.0, 11.0, 12.0]);
        let mut c = Tensor::zeros(&[2, 2]);
        gemm(1.0, &a, Trans::No, &b, Trans::No, 0.0, &mut c);
        assert_eq!(c.data(), &[58.0, 64.0, 139.0, 154.0]);
    }

    #[test]
    fn gemm_transpose_views() {
        // A stored [3x2], used as A^T [2x3].
        let a = Tensor::from_vec(&[3, 2], vec![1.0f64, 4.0, 2.0, 5.0, 3.0, 6.0]);
        let b = Tensor::from_vec(&[3, 2], vec![7.0, 8.0, 9.0, 10.0, 11.0, 12.0]);
        let mut c = Tensor::zeros(&[2, 2]);
        gemm(1.0, &a, Trans::Yes, &b, Trans::No, 0.0, &mut c);
        assert_eq!(c.data(), &[58.0, 64.0, 139.0, 154.0]);
    }

    #[test]
    fn timestep_gemm_reads_strided_rows() {
        // x: [batch=2, time=3, dim=2]; take t=1 rows.
        let x = Tensor::from_vec(
            &[2, 3, 2],
            vec![
                0.0f64, 0.0, 1.0, 2.0, 0.0, 0.0, // batch 0
                0.0, 0.0, 3.0, 4.0, 0.0, 0.0, // batch 1
            ],
        );
        let w = Tensor::from_vec(&[2, 2], vec![1.0, 0.0, 0.0, 1.0]);
        let mut c = Tensor::zeros(&[2, 2]);
        gemm_timestep(1.0, &x, 1, &w, 0.0, &mut c);
        assert_eq!(c.data(), &[1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn container_round_trip() {
        let t1 = Tensor::from_vec(&[2, 2], vec![1.0f32, -2.5, 3.25, 0.0]);
        let t2 = Tensor::from_vec(&[3], vec![0.5f32, 1.5, -0.75]);
        let mut bytes = Vec::new();
        write_container(
            &mut bytes,
            &[("w".to_string(), &t1), ("b".to_string(), &t2)],
        )
        .unwrap();
        let back = read_container(&bytes[..]).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[0].0, "w");
        assert_eq!(back[0].1, t1);
        assert_eq!(back[1].0, "b");
        assert_eq!(back[1].1, t2);
    }

    #[test]
    fn container_rejects_truncation_and_bad_magic() {
        let t1 = Tensor::from_vec(&[2], vec![1.0f32, 2.0]);
        let mut bytes = Vec::new();
        write_container(&mut bytes, &[("x".to_string(), &t1)]).unwrap();

        let truncated = &bytes[..bytes.len() - 2];
        assert!(matches!(
            read_container(truncated),
            Err(ContainerError::Truncated(_))
        ));

        let mut corrupt = bytes.clone();
        corrupt[0] = b'X';
        assert!(matches!(
            read_container(&corrupt[..]),
            Err(ContainerError::BadMagic)
        ));
    }
}
