#include "turbocs/numerics.hpp"

namespace turbocs {

namespace {

thread_local FlopCounter* tls_active = nullptr;

}  // namespace

namespace flops {

FlopCounter* active() noexcept { return tls_active; }

void charge(std::uint64_t n) noexcept {
  if (tls_active != nullptr) tls_active->add(n);
}

}  // namespace flops

CounterScope::CounterScope() noexcept : parent_(tls_active) { tls_active = &counter_; }

CounterScope::CounterScope(DetachedScope) noexcept : CounterScope() { propagate_ = false; }

CounterScope::~CounterScope() {
  tls_active = parent_;
  if (propagate_ && parent_ != nullptr) parent_->add(counter_.count());
}

}  // namespace turbocs
