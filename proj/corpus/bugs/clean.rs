// Functions with correct annotations. None of these should be reported.
use std::slice;

pub struct Holder<'a> {
    r: &'a i32,
}

pub struct RawBuf<T> {
    ptr: *mut T,
    len: usize,
}

pub fn first<'a>(v: &'a [i32]) -> &'a i32 {
    &v[0]
}

pub fn get<'a>(h: &Holder<'a>) -> &'a i32 {
    h.r
}

pub fn longest<'a>(x: &'a str, y: &'a str) -> &'a str {
    if x.len() > y.len() {
        x
    } else {
        y
    }
}

pub fn swap_vals(a: &mut i32, b: &mut i32) {
    let t = *a;
    *a = *b;
    *b = t;
}

pub fn set<'a>(slot: &mut &'a i32, v: &'a i32) {
    *slot = v;
}

impl<T> RawBuf<T> {
    pub fn new(ptr: *mut T, len: usize) -> RawBuf<T> {
        RawBuf { ptr: ptr, len: len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn as_slice(&self) -> &[T] {
        unsafe { slice::from_raw_parts(self.ptr, self.len) }
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        unsafe { slice::from_raw_parts_mut(self.ptr, self.len) }
    }

    pub fn first(&self) -> Option<&T> {
        if self.len == 0 {
            None
        } else {
            unsafe { self.ptr.as_ref() }
        }
    }
}
