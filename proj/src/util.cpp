#include "llmbda/util.hpp"

#include <pthread.h>

#include <exception>
#include <stdexcept>
#include <system_error>

namespace llmbda::util {

namespace {

struct CallFrame {
    const std::function<void()>* fn;
    std::exception_ptr error;
};

void* trampoline(void* raw) {
    auto* frame = static_cast<CallFrame*>(raw);
    try {
        (*frame->fn)();
    } catch (...) {
        frame->error = std::current_exception();
    }
    return nullptr;
}

}  // namespace

void run_with_large_stack(const std::function<void()>& fn, std::size_t stack_bytes) {
    pthread_attr_t attr;
    if (pthread_attr_init(&attr) != 0) throw std::system_error(errno, std::generic_category(), "pthread_attr_init");
    pthread_attr_setstacksize(&attr, stack_bytes);
    CallFrame frame{&fn, nullptr};
    pthread_t thread;
    int rc = pthread_create(&thread, &attr, trampoline, &frame);
    pthread_attr_destroy(&attr);
    if (rc != 0) throw std::system_error(rc, std::generic_category(), "pthread_create");
    pthread_join(thread, nullptr);
    if (frame.error) std::rethrow_exception(frame.error);
}

}  // namespace llmbda::util
