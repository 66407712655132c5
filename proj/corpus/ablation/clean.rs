use std::slice;

pub struct Buf<T> {
    ptr: *mut T,
    len: usize,
}

impl<T> Buf<T> {
    pub fn as_slice(&self) -> &[T] {
        unsafe { slice::from_raw_parts(self.ptr, self.len) }
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        unsafe { slice::from_raw_parts_mut(self.ptr, self.len) }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

pub fn pick<'a>(x: &'a i32, y: &'a i32, first: bool) -> &'a i32 {
    if first {
        x
    } else {
        y
    }
}

pub fn first_of<'a>(v: &'a [i32]) -> &'a i32 {
    &v[0]
}

pub fn replace(slot: &mut i32, v: i32) -> i32 {
    let old = *slot;
    *slot = v;
    old
}
