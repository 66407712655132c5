// Transcribed from the cslice crate.
use std::marker::PhantomData;
use std::slice;

#[derive(Clone, Copy)]
pub struct CMutSlice<'a, T> {
    base: *mut T,
    len: usize,
    _marker: PhantomData<&'a ()>,
}

impl<'a, T> CMutSlice<'a, T> {
    pub fn as_mut_slice(&mut self) -> &'a mut [T] {
        unsafe { slice::from_raw_parts_mut(self.base, self.len) }
    }
}
