struct Foo<'a> { x: *mut String,
                 w: &'a mut i32 }
struct Bar { y: String,
             z: *mut i32 }

fn bar<'a,'b>(arg1: &'a mut i32,
              arg2: &'b mut Bar)
        -> Foo<'a> {
    let ret = Foo{ x: &mut (*arg2).y,
                   w: arg1 };
    ret
}
