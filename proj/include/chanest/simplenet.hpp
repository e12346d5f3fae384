#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chanest/dataset.hpp"
#include "chanest/types.hpp"

namespace chanest {

/** One 3x3 same-padding convolution layer. */
struct ConvLayer {
    int out_ch = 0;
    int in_ch = 0;
    std::vector<mat_t> w;  // out_ch * in_ch kernels of 3x3, index o * in_ch + i
    vec_t b;

    const mat_t& kernel(int o, int i) const { return w[static_cast<std::size_t>(o * in_ch + i)]; }
    mat_t& kernel(int o, int i) { return w[static_cast<std::size_t>(o * in_ch + i)]; }
    int param_count() const { return out_ch * in_ch * 9 + out_ch; }
    static ConvLayer zeros(int out_ch, int in_ch);
};

struct NetShape {
    int in_rows = 36;
    int in_cols = 4;
    int out_rows = 72;
    int out_cols = 14;
    bool resize_first = true;  // resize the pilot grid before the conv stack
};

/**
 * Channel-estimation network: complex pilot grid split into two real
 * channels, bilinear resize to the slot size, then conv(8) - ReLU -
 * conv(8) - ReLU - conv(2) reassembled into a complex estimate.
 */
struct ModelParams {
    NetShape shape;
    ConvLayer c1;  // 8 filters, 2 input channels
    ConvLayer c2;  // 8 filters, 8 input channels
    ConvLayer c3;  // 2 filters, 8 input channels

    int param_count() const { return c1.param_count() + c2.param_count() + c3.param_count(); }
    vec_t flatten() const;
    void unflatten(const vec_t& theta);

    static ModelParams zeros(const NetShape& shape);
    /** Uniform +-sqrt(6/(fan_in+fan_out)) weights, zero biases. */
    static ModelParams glorot(const NetShape& shape, std::uint64_t seed);
};

ChannelMatrix forward(const ModelParams& params, const cmat_t& feature);

scalar_t loss_mse(const ChannelMatrix& estimate, const ChannelMatrix& label);

/** Exact gradients of loss_mse(forward(feature), label) in flatten() order. */
vec_t backward(const ModelParams& params, const cmat_t& feature, const cmat_t& label,
               scalar_t* loss_out = nullptr);

struct AdamState {
    vec_t m;
    vec_t v;
    std::int64_t t = 0;

    static AdamState zeros(int n) { return {vec_t::Zero(n), vec_t::Zero(n), 0}; }
};

struct AdamConfig {
    scalar_t beta1 = 0.9;
    scalar_t beta2 = 0.999;
    scalar_t eps = 1e-8;
};

/** Bias-corrected Adam update in place. Throws on non-finite gradients. */
void adam_step(vec_t& theta, const vec_t& grad, AdamState& state, scalar_t lr,
               const AdamConfig& adam = {});

struct TrainConfig {
    int max_epochs = 100;
    scalar_t initial_lr = 0.002;
    int lr_drop_period = 20;
    scalar_t lr_drop_factor = 0.5;
    int minibatch = 128;
    scalar_t l2 = 0.0;  // kept at zero
    AdamConfig adam;
    scalar_t split = 0.95;
    std::uint64_t seed = 0;
    std::optional<std::uint64_t> shuffle_seed;  // defaults to a value derived from seed
    bool resize_first = true;
};

struct TrainLog {
    std::vector<scalar_t> train_loss;  // mean minibatch loss per epoch
    std::vector<scalar_t> val_mse;
    std::vector<scalar_t> lr;
    bool aborted_non_finite = false;
};

struct TrainResult {
    ModelParams params;
    TrainLog log;
};

/**
 * Epoch loop with the stepped learning-rate schedule
 * lr * factor^floor(epoch/period), deterministic shuffling, per-epoch train
 * and validation MSE. Returns the final-epoch parameters (or the last finite
 * snapshot if the loss diverges).
 */
TrainResult train(const Dataset& dataset, const TrainConfig& cfg);

/** Mean loss of forward() over a sample range (validation helper). */
scalar_t mean_mse(const ModelParams& params, const std::vector<DatasetSample>& samples, int lo,
                  int hi);

void save_model(const ModelParams& params, const std::string& path);
ModelParams load_model(const std::string& path);

}  // namespace chanest
