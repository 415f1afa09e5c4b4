#pragma once

#include "ammknn/error.hpp"

#include <optional>
#include <string>

namespace ammknn {

template <typename T>
std::vector<T> loocv_map(const Frame& frame, const FoldFunction<T>& fn, unsigned threads) {
    if (frame.num_rows() < 2)
        throw Error(ErrorCode::EmptyTrainingSet, "leave-one-out needs at least two rows");

    std::vector<std::optional<T>> slots(frame.num_rows());
    parallel_for(frame.num_rows(), threads, [&](std::size_t i) {
        try {
            auto [training, held_out] = loocv_fold(frame, i);
            slots[i].emplace(fn(training, held_out));
        } catch (const Error& e) {
            throw e.with_context("fold " + std::to_string(i));
        }
    });

    std::vector<T> out;
    out.reserve(slots.size());
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

} // namespace ammknn
