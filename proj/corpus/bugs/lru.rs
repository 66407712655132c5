// Transcribed from the lru crate before the fix for the `iter` lifetime.
use std::collections::HashMap;
use std::marker::PhantomData;

pub struct LruEntry<K, V> {
    key: K,
    val: V,
    prev: *mut LruEntry<K, V>,
    next: *mut LruEntry<K, V>,
}

pub struct LruCache<K, V, S> {
    map: HashMap<K, Box<LruEntry<K, V>>, S>,
    cap: usize,
    head: *mut LruEntry<K, V>,
    tail: *mut LruEntry<K, V>,
}

pub struct Iter<'a, K: 'a, V: 'a> {
    len: usize,
    ptr: *const LruEntry<K, V>,
    end: *const LruEntry<K, V>,
    phantom: PhantomData<&'a K>,
}

impl<K, V, S> LruCache<K, V, S> {
    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn iter<'a>(&'_ self) -> Iter<'a, K, V> {
        Iter {
            len: self.len(),
            ptr: unsafe { (*self.head).next },
            end: unsafe { (*self.tail).prev },
            phantom: PhantomData,
        }
    }
}

impl<'a, K, V> Iterator for Iter<'a, K, V> {
    type Item = (&'a K, &'a V);

    fn next(&mut self) -> Option<(&'a K, &'a V)> {
        if self.len == 0 {
            return None;
        }
        let key = unsafe { &(*self.ptr).key };
        let val = unsafe { &(*self.ptr).val };
        self.len -= 1;
        self.ptr = unsafe { (*self.ptr).next };
        Some((key, val))
    }
}
