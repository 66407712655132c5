// Iterator methods hand out items for the iterator's own lifetime by design.
use std::marker::PhantomData;

pub struct RawIter<'a, T> {
    ptr: *mut T,
    end: *mut T,
    marker: PhantomData<&'a mut T>,
}

impl<'a, T> Iterator for RawIter<'a, T> {
    type Item = &'a mut T;

    fn next(&mut self) -> Option<&'a mut T> {
        if self.ptr == self.end {
            return None;
        }
        let p = self.ptr;
        self.ptr = unsafe { self.ptr.add(1) };
        Some(unsafe { &mut *p })
    }
}

impl<'a, T> DoubleEndedIterator for RawIter<'a, T> {
    fn next_back(&mut self) -> Option<&'a mut T> {
        if self.ptr == self.end {
            return None;
        }
        self.end = unsafe { self.end.sub(1) };
        Some(unsafe { &mut *self.end })
    }
}
