// Signatures that match a pattern but whose bodies never move the value.
pub struct Pool<T> {
    ptr: *mut T,
    len: usize,
    fallback: &'static T,
}

impl<T> Pool<T> {
    pub fn peek<'a>(&self) -> &'a T {
        self.fallback
    }

    pub fn fill<'a>(&mut self, buf: &'a mut [T]) -> &'a mut [T] {
        buf
    }

    pub fn same_len(&self, other: &Pool<T>) -> bool {
        self.len == other.len
    }

    pub fn copy_len(&mut self, other: &mut Pool<T>) {
        self.len = other.len;
    }

    pub fn stash<'a>(&mut self, v: &'a mut T) -> &'a mut T {
        v
    }
}
