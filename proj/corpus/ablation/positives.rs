// Functions whose annotations let a value outlive or alias what it came from.
use std::cell::RefCell;
use std::marker::PhantomData;
use std::slice;

pub struct Node<T> {
    value: T,
    next: *mut Node<T>,
}

pub struct List<T> {
    head: *mut Node<T>,
    len: usize,
}

pub struct Cursor<'a, T: 'a> {
    cur: *const Node<T>,
    marker: PhantomData<&'a T>,
}

impl<T> List<T> {
    pub fn cursor<'a>(&self) -> Cursor<'a, T> {
        Cursor {
            cur: unsafe { (*self.head).next },
            marker: PhantomData,
        }
    }
}

pub struct Slot<T> {
    ptr: *mut T,
}

impl<T> Slot<T> {
    pub fn get<'a>(&self) -> &'a T {
        unsafe { &*self.ptr }
    }

    pub fn get_mut<'a>(&mut self) -> &'a mut T {
        unsafe { &mut *self.ptr }
    }
}

pub struct Window<'a, T: 'a> {
    data: *mut T,
    len: usize,
    marker: PhantomData<&'a mut T>,
}

impl<'a, T: 'a> Window<'a, T> {
    pub fn as_mut(&mut self) -> &'a mut [T] {
        unsafe { slice::from_raw_parts_mut(self.data, self.len) }
    }
}

pub struct Raw {
    handle: *mut u8,
}

pub struct Conn {
    inner: RefCell<Raw>,
}

impl Conn {
    pub fn set_handler<'c, F>(&'c self, handler: Option<F>)
    where
        F: FnMut(i32) + 'c,
    {
        self.inner.borrow_mut().set_handler(handler);
    }
}

pub struct Pair<'a> {
    raw: *mut String,
    count: &'a mut i32,
}

pub struct Owner {
    name: String,
    spare: *mut i32,
}

pub fn pair_up<'a, 'b>(count: &'a mut i32, owner: &'b mut Owner) -> Pair<'a> {
    let p = Pair { raw: &mut (*owner).name, count: count };
    p
}
