#include <atomic>
#include <cstdlib>
#include <string_view>

#include "qcpd/kernels.hpp"

namespace qcpd::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(QCPD_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

const KernelTable *pick_default() {
    const char *requested = std::getenv("QCPD_KERNEL");
    if (requested != nullptr) {
        const std::string_view want{requested};
        for (const KernelTable *t : available()) {
            if (t->name == want) {
                return t;
            }
        }
    }
    return available().back();
}

std::atomic<const KernelTable *> &override_slot() {
    static std::atomic<const KernelTable *> slot{nullptr};
    return slot;
}

} // namespace

const KernelTable &scalar() { return detail::scalar_table(); }

const KernelTable *avx2() {
#if defined(QCPD_HAVE_AVX2)
    static const bool supported = cpu_has_avx2();
    return supported ? &detail::avx2_table() : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable *neon() {
#if defined(QCPD_HAVE_NEON)
    return &detail::neon_table();
#else
    return nullptr;
#endif
}

std::vector<const KernelTable *> available() {
    std::vector<const KernelTable *> out{&scalar()};
    if (const KernelTable *t = neon()) {
        out.push_back(t);
    }
    if (const KernelTable *t = avx2()) {
        out.push_back(t);
    }
    return out;
}

const KernelTable &active() {
    if (const KernelTable *forced =
            override_slot().load(std::memory_order_acquire)) {
        return *forced;
    }
    static const KernelTable *chosen = pick_default();
    return *chosen;
}

void set_active(const KernelTable *table) {
    override_slot().store(table, std::memory_order_release);
}

} // namespace qcpd::kernels
