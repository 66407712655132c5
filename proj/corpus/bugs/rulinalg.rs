// Transcribed from rulinalg's `RowMut::raw_slice_mut`.
use std::marker::PhantomData;
use std::slice::from_raw_parts_mut;

pub struct MatrixSliceMut<'a, T: 'a> {
    ptr: *mut T,
    rows: usize,
    cols: usize,
    row_stride: usize,
    marker: PhantomData<&'a mut T>,
}

pub struct RowMut<'a, T: 'a> {
    row: MatrixSliceMut<'a, T>,
}

impl<'a, T: 'a> RowMut<'a, T> {
    /// Returns the row as a slice.
    pub fn raw_slice_mut(&mut self) -> &'a mut [T] {
        unsafe { from_raw_parts_mut(self.row.ptr, self.row.cols) }
    }
}
