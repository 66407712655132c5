// `Waker` and `RawWaker` come from another crate; their definitions (and the
// raw pointer inside) are not visible here.
use std::sync::Arc;
use std::task::{RawWaker, RawWakerVTable, Waker};

pub trait Wake {
    fn wake(self: Arc<Self>);
}

pub fn waker<W: Wake + Send + Sync + 'static>(wake: Arc<W>) -> Waker {
    let ptr = Arc::into_raw(wake) as *const ();
    unsafe { Waker::from_raw(RawWaker::new(ptr, &VTABLE)) }
}
