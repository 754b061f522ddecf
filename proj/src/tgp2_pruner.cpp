#include "omniselect/tgp2_pruner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "omniselect/simd/kernels.hpp"

namespace omniselect {

namespace {

// Top-k / bottom-k with deterministic lowest-index tie-break.
std::vector<std::size_t> pick(std::span<const float> scores, std::size_t k, bool largest) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) {
            return largest ? scores[a] > scores[b] : scores[a] < scores[b];
        }
        return a < b;
    });
    order.resize(k);
    std::sort(order.begin(), order.end());
    return order;
}

void check_row_stochastic(MatrixView block, std::size_t head) {
    for (std::size_t r = 0; r < block.rows; ++r) {
        double sum = 0.0;
        for (float v : block.row(r)) sum += v;
        if (std::abs(sum - 1.0) > 1e-4) {
            throw ValidationError("attention row " + std::to_string(r) + " of head " +
                                  std::to_string(head) + " sums to " + std::to_string(sum) +
                                  ", expected 1");
        }
    }
}

} // namespace

Tensor compute_attention(const Tensor& q, const Tensor& k) {
    std::size_t n = q.rows();
    std::size_t dim = q.cols();
    if (k.rows() != n || k.cols() != dim) {
        throw ValidationError("attention: query/key shapes disagree");
    }
    if (n == 0 || dim == 0) throw ValidationError("attention: empty projections");

    float inv_sqrt_d = static_cast<float>(1.0 / std::sqrt(static_cast<double>(dim)));
    Tensor out({n, n});
    float* rows = out.data();
    for (std::size_t i = 0; i < n; ++i) {
        float* row = rows + i * n;
        std::span<const float> qi = q.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            row[j] = simd::dot(qi.data(), k.data() + j * dim, dim);
        }
        simd::scale(row, n, inv_sqrt_d);
        float row_max = simd::reduce_max(row, n);
        float sum = simd::exp_bias_sum(row, n, -row_max);
        simd::scale(row, n, 1.0f / sum);
    }
    return out;
}

std::vector<float> attention_column_means(MatrixView block) {
    if (block.rows == 0 || block.cols == 0) {
        throw ValidationError("attention block is empty");
    }
    std::vector<float> acc(block.cols, 0.0f);
    for (std::size_t r = 0; r < block.rows; ++r) {
        simd::accumulate(acc.data(), block.data + r * block.cols, block.cols);
    }
    simd::scale(acc.data(), acc.size(), 1.0f / static_cast<float>(block.rows));
    return acc;
}

std::vector<float> average_attention(const Tensor& attention) {
    std::size_t heads = 1;
    std::size_t n = 0;
    if (attention.rank() == 2) {
        n = attention.extent(0);
        if (attention.extent(1) != n) {
            throw ValidationError("attention matrix must be square");
        }
    } else if (attention.rank() == 3) {
        heads = attention.extent(0);
        n = attention.extent(1);
        if (attention.extent(2) != n || heads == 0) {
            throw ValidationError("attention tensor must be heads x n x n");
        }
    } else {
        throw ValidationError("attention tensor must have rank 2 or 3");
    }
    if (n == 0) throw ValidationError("attention tensor is empty");

    for (std::size_t h = 0; h < heads; ++h) {
        check_row_stochastic({attention.data() + h * n * n, n, n}, h);
    }
    // single pass over all heads' rows == head-mean then query-mean
    return attention_column_means({attention.data(), heads * n, n});
}

std::vector<float> pool_attention(std::span<const float> scores, std::size_t factor) {
    if (factor == 0) throw ValidationError("pool factor must be >= 1");
    if (scores.empty()) throw ValidationError("pool_attention: empty scores");
    std::size_t pooled = (scores.size() + factor - 1) / factor;
    std::vector<float> out(pooled);
    for (std::size_t j = 0; j < pooled; ++j) {
        std::size_t begin = j * factor;
        std::size_t end = std::min(begin + factor, scores.size());
        float sum = 0.0f;
        for (std::size_t i = begin; i < end; ++i) sum += scores[i];
        out[j] = sum / static_cast<float>(end - begin);
    }
    return out;
}

RetainedIndices select_audio(std::span<const float> pooled_scores, double rho) {
    if (pooled_scores.empty()) throw ValidationError("select_audio: empty scores");
    if (rho < 0.0 || rho > 1.0) throw ValidationError("select_audio: rho outside [0, 1]");
    std::size_t k = retained_count(rho, pooled_scores.size());
    RetainedIndices out;
    out.modality = Modality::audio;
    out.indices = pick(pooled_scores, k, /*largest=*/true);
    return out;
}

std::vector<float> video_redundancy_scores(MatrixView embeddings) {
    std::size_t n = embeddings.rows;
    std::size_t dim = embeddings.cols;
    if (n == 0 || dim == 0) throw ValidationError("redundancy: empty embeddings");

    std::vector<float> normalized(n * dim);
    for (std::size_t i = 0; i < n; ++i) {
        const float* src = embeddings.data + i * dim;
        float norm_sq = simd::dot(src, src, dim);
        if (norm_sq == 0.0f) {
            throw DegenerateInputError("redundancy: zero-norm token at row " +
                                       std::to_string(i));
        }
        float inv = 1.0f / std::sqrt(norm_sq);
        float* dst = normalized.data() + i * dim;
        std::copy(src, src + dim, dst);
        simd::scale(dst, dim, inv);
    }

    // The row mean of the cosine matrix equals the dot product with the
    // mean normalized embedding, so the n x n matrix never materializes.
    std::vector<float> mean(dim, 0.0f);
    for (std::size_t i = 0; i < n; ++i) {
        simd::accumulate(mean.data(), normalized.data() + i * dim, dim);
    }
    simd::scale(mean.data(), dim, 1.0f / static_cast<float>(n));

    std::vector<float> scores(n);
    for (std::size_t i = 0; i < n; ++i) {
        scores[i] = simd::dot(normalized.data() + i * dim, mean.data(), dim);
    }
    return scores;
}

RetainedIndices select_video(std::span<const float> redundancy, double rho) {
    if (redundancy.empty()) throw ValidationError("select_video: empty scores");
    if (rho < 0.0 || rho > 1.0) throw ValidationError("select_video: rho outside [0, 1]");
    std::size_t k = retained_count(rho, redundancy.size());
    RetainedIndices out;
    out.modality = Modality::video;
    out.indices = pick(redundancy, k, /*largest=*/false);
    return out;
}

std::pair<RetainedIndices, RetainedIndices> prune_group(const TemporalGroup& group,
                                                        MatrixView video_embeddings,
                                                        const AudioAttentionInput& audio,
                                                        const AllocationPlan& plan,
                                                        std::size_t pool_factor) {
    std::size_t gid = group.group_id;
    if (gid >= plan.rho_video.size() || gid >= plan.rho_audio.size()) {
        throw ValidationError("allocation plan does not cover group " + std::to_string(gid));
    }

    RetainedIndices video;
    video.group_id = gid;
    video.modality = Modality::video;
    std::size_t n_video = group.video_range.length();
    if (n_video > 0) {
        if (video_embeddings.rows != n_video) {
            throw ValidationError("group " + std::to_string(gid) + ": video slice has " +
                                  std::to_string(video_embeddings.rows) + " rows, range wants " +
                                  std::to_string(n_video));
        }
        std::vector<float> scores = video_redundancy_scores(video_embeddings);
        video = select_video(scores, plan.rho_video[gid]);
        video.group_id = gid;
    }

    RetainedIndices retained_audio;
    retained_audio.group_id = gid;
    retained_audio.modality = Modality::audio;
    std::size_t n_audio = group.audio_range.length();
    if (n_audio > 0) {
        std::vector<float> per_key;
        if (const AudioQk* qk = std::get_if<AudioQk>(&audio)) {
            if (qk->q.rows() != n_audio) {
                throw ValidationError("group " + std::to_string(gid) +
                                      ": audio projections do not match the group's token count");
            }
            Tensor attn = compute_attention(qk->q, qk->k);
            per_key = attention_column_means(attn.view());
        } else {
            const Tensor& attn = std::get<Tensor>(audio);
            std::size_t n = attn.rank() == 3 ? attn.extent(1) : attn.extent(0);
            if (n != n_audio) {
                throw ValidationError("group " + std::to_string(gid) +
                                      ": attention size does not match the group's token count");
            }
            per_key = average_attention(attn);
        }
        std::vector<float> pooled = pool_attention(per_key, pool_factor);
        retained_audio = select_audio(pooled, plan.rho_audio[gid]);
        retained_audio.group_id = gid;
    }

    return {std::move(video), std::move(retained_audio)};
}

} // namespace omniselect
