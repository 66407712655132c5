// Transcribed from rusqlite's `update_hook` before the bound on `F` was
// tightened.
use std::cell::RefCell;

mod ffi {
    pub enum sqlite3 {}
}

pub enum Action {
    Unknown,
    Insert,
    Delete,
    Update,
}

pub struct InnerConnection {
    db: *mut ffi::sqlite3,
    owned: bool,
}

pub struct Connection {
    db: RefCell<InnerConnection>,
}

impl Connection {
    pub fn update_hook<'c, F>(&'c self, hook: Option<F>)
    where
        F: FnMut(Action, &str, &str, i64) + Send + 'c,
    {
        self.db.borrow_mut().update_hook(hook);
    }
}
