#include "chanest/simplenet.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "chanest/interp.hpp"
#include "chanest/parallel.hpp"
#include "chanest/rng.hpp"

namespace chanest {

namespace {

// out(r, c) += sum_{dr, dc} k(1+dr, 1+dc) * x(r+dr, c+dc), zero padded
void conv3x3_acc(const mat_t& x, const mat_t& k, mat_t& out) {
    const Eigen::Index rows = x.rows();
    const Eigen::Index cols = x.cols();
    for (int dr = -1; dr <= 1; ++dr) {
        const Eigen::Index r_out = std::max(0, -dr);
        const Eigen::Index r_in = std::max(0, dr);
        const Eigen::Index h = rows - std::abs(dr);
        for (int dc = -1; dc <= 1; ++dc) {
            const Eigen::Index c_out = std::max(0, -dc);
            const Eigen::Index c_in = std::max(0, dc);
            const Eigen::Index w = cols - std::abs(dc);
            out.block(r_out, c_out, h, w).noalias() += k(1 + dr, 1 + dc) * x.block(r_in, c_in, h, w);
        }
    }
}

// dk(1+dr, 1+dc) += sum_{r, c} dy(r, c) * x(r+dr, c+dc)
void corr3x3_acc(const mat_t& dy, const mat_t& x, mat_t& dk) {
    const Eigen::Index rows = x.rows();
    const Eigen::Index cols = x.cols();
    for (int dr = -1; dr <= 1; ++dr) {
        const Eigen::Index r_out = std::max(0, -dr);
        const Eigen::Index r_in = std::max(0, dr);
        const Eigen::Index h = rows - std::abs(dr);
        for (int dc = -1; dc <= 1; ++dc) {
            const Eigen::Index c_out = std::max(0, -dc);
            const Eigen::Index c_in = std::max(0, dc);
            const Eigen::Index w = cols - std::abs(dc);
            dk(1 + dr, 1 + dc) +=
                dy.block(r_out, c_out, h, w).cwiseProduct(x.block(r_in, c_in, h, w)).sum();
        }
    }
}

using Channels = std::vector<mat_t>;

Channels conv_layer(const Channels& x, const ConvLayer& layer) {
    Channels out(static_cast<std::size_t>(layer.out_ch));
    for (int o = 0; o < layer.out_ch; ++o) {
        mat_t acc = mat_t::Constant(x[0].rows(), x[0].cols(), layer.b(o));
        for (int i = 0; i < layer.in_ch; ++i) conv3x3_acc(x[static_cast<std::size_t>(i)], layer.kernel(o, i), acc);
        out[static_cast<std::size_t>(o)] = std::move(acc);
    }
    return out;
}

Channels relu(const Channels& x) {
    Channels out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i].cwiseMax(0.0);
    return out;
}

struct ResizeOps {
    mat_t rows;  // out_rows x in_rows
    mat_t cols;  // out_cols x in_cols
};

ResizeOps resize_ops(const NetShape& shape) {
    return {resize_matrix(shape.in_rows, shape.out_rows),
            resize_matrix(shape.in_cols, shape.out_cols)};
}

Channels split_channels(const cmat_t& feature) {
    return {feature.real(), feature.imag()};
}

struct ForwardCache {
    Channels x;   // conv-stack input
    Channels z1, a1, z2, a2, z3;
};

ForwardCache run_forward(const ModelParams& params, const cmat_t& feature, const ResizeOps& rs) {
    ForwardCache cache;
    Channels raw = split_channels(feature);
    if (params.shape.resize_first) {
        cache.x.resize(2);
        for (int c = 0; c < 2; ++c)
            cache.x[static_cast<std::size_t>(c)] =
                rs.rows * raw[static_cast<std::size_t>(c)] * rs.cols.transpose();
    } else {
        cache.x = std::move(raw);
    }
    cache.z1 = conv_layer(cache.x, params.c1);
    cache.a1 = relu(cache.z1);
    cache.z2 = conv_layer(cache.a1, params.c2);
    cache.a2 = relu(cache.z2);
    cache.z3 = conv_layer(cache.a2, params.c3);
    return cache;
}

cmat_t assemble_output(const ModelParams& params, const ForwardCache& cache, const ResizeOps& rs) {
    mat_t re = cache.z3[0];
    mat_t im = cache.z3[1];
    if (!params.shape.resize_first) {
        re = rs.rows * re * rs.cols.transpose();
        im = rs.rows * im * rs.cols.transpose();
    }
    cmat_t out(re.rows(), re.cols());
    out.real() = re;
    out.imag() = im;
    return out;
}

void check_feature_dims(const ModelParams& params, const cmat_t& feature) {
    if (feature.rows() != params.shape.in_rows || feature.cols() != params.shape.in_cols)
        throw std::invalid_argument("forward: feature dimensions do not match the model");
}

}  // namespace

ConvLayer ConvLayer::zeros(int out_ch_, int in_ch_) {
    ConvLayer layer;
    layer.out_ch = out_ch_;
    layer.in_ch = in_ch_;
    layer.w.assign(static_cast<std::size_t>(out_ch_ * in_ch_), mat_t::Zero(3, 3));
    layer.b = vec_t::Zero(out_ch_);
    return layer;
}

ModelParams ModelParams::zeros(const NetShape& shape) {
    ModelParams p;
    p.shape = shape;
    p.c1 = ConvLayer::zeros(8, 2);
    p.c2 = ConvLayer::zeros(8, 8);
    p.c3 = ConvLayer::zeros(2, 8);
    return p;
}

ModelParams ModelParams::glorot(const NetShape& shape, std::uint64_t seed) {
    ModelParams p = zeros(shape);
    Rng rng(seed);
    for (ConvLayer* layer : {&p.c1, &p.c2, &p.c3}) {
        const scalar_t fan_in = static_cast<scalar_t>(layer->in_ch * 9);
        const scalar_t fan_out = static_cast<scalar_t>(layer->out_ch * 9);
        const scalar_t bound = std::sqrt(6.0 / (fan_in + fan_out));
        for (auto& k : layer->w)
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 3; ++c) k(r, c) = rng.uniform(-bound, bound);
    }
    return p;
}

vec_t ModelParams::flatten() const {
    vec_t theta(param_count());
    Eigen::Index at = 0;
    for (const ConvLayer* layer : {&c1, &c2, &c3}) {
        for (const auto& k : layer->w)
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 3; ++c) theta(at++) = k(r, c);
        for (Eigen::Index i = 0; i < layer->b.size(); ++i) theta(at++) = layer->b(i);
    }
    return theta;
}

void ModelParams::unflatten(const vec_t& theta) {
    if (theta.size() != param_count())
        throw std::invalid_argument("unflatten: parameter vector length mismatch");
    Eigen::Index at = 0;
    for (ConvLayer* layer : {&c1, &c2, &c3}) {
        for (auto& k : layer->w)
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 3; ++c) k(r, c) = theta(at++);
        for (Eigen::Index i = 0; i < layer->b.size(); ++i) layer->b(i) = theta(at++);
    }
}

ChannelMatrix forward(const ModelParams& params, const cmat_t& feature) {
    check_feature_dims(params, feature);
    const ResizeOps rs = resize_ops(params.shape);
    const ForwardCache cache = run_forward(params, feature, rs);
    return assemble_output(params, cache, rs);
}

scalar_t loss_mse(const ChannelMatrix& estimate, const ChannelMatrix& label) {
    if (estimate.rows() != label.rows() || estimate.cols() != label.cols())
        throw std::invalid_argument("loss_mse: dimension mismatch");
    return (estimate - label).squaredNorm() / static_cast<scalar_t>(estimate.size());
}

vec_t backward(const ModelParams& params, const cmat_t& feature, const cmat_t& label,
               scalar_t* loss_out) {
    check_feature_dims(params, feature);
    const ResizeOps rs = resize_ops(params.shape);
    const ForwardCache cache = run_forward(params, feature, rs);
    const cmat_t estimate = assemble_output(params, cache, rs);
    if (loss_out) *loss_out = loss_mse(estimate, label);

    const scalar_t scale = 2.0 / static_cast<scalar_t>(estimate.size());
    const cmat_t resid = estimate - label;
    Channels delta3 = {scale * resid.real(), scale * resid.imag()};
    if (!params.shape.resize_first) {
        for (auto& d : delta3) d = (rs.rows.transpose() * d * rs.cols).eval();
    }

    ModelParams grads = ModelParams::zeros(params.shape);

    // layer 3
    Channels da2(8, mat_t::Zero(cache.a2[0].rows(), cache.a2[0].cols()));
    for (int o = 0; o < 2; ++o) {
        grads.c3.b(o) = delta3[static_cast<std::size_t>(o)].sum();
        for (int i = 0; i < 8; ++i) {
            corr3x3_acc(delta3[static_cast<std::size_t>(o)], cache.a2[static_cast<std::size_t>(i)],
                        grads.c3.kernel(o, i));
            const mat_t flipped = params.c3.kernel(o, i).reverse();
            conv3x3_acc(delta3[static_cast<std::size_t>(o)], flipped, da2[static_cast<std::size_t>(i)]);
        }
    }
    Channels delta2(8);
    for (int i = 0; i < 8; ++i)
        delta2[static_cast<std::size_t>(i)] =
            da2[static_cast<std::size_t>(i)].cwiseProduct(
                (cache.z2[static_cast<std::size_t>(i)].array() > 0.0).cast<scalar_t>().matrix());

    // layer 2
    Channels da1(8, mat_t::Zero(cache.a1[0].rows(), cache.a1[0].cols()));
    for (int o = 0; o < 8; ++o) {
        grads.c2.b(o) = delta2[static_cast<std::size_t>(o)].sum();
        for (int i = 0; i < 8; ++i) {
            corr3x3_acc(delta2[static_cast<std::size_t>(o)], cache.a1[static_cast<std::size_t>(i)],
                        grads.c2.kernel(o, i));
            const mat_t flipped = params.c2.kernel(o, i).reverse();
            conv3x3_acc(delta2[static_cast<std::size_t>(o)], flipped, da1[static_cast<std::size_t>(i)]);
        }
    }
    Channels delta1(8);
    for (int i = 0; i < 8; ++i)
        delta1[static_cast<std::size_t>(i)] =
            da1[static_cast<std::size_t>(i)].cwiseProduct(
                (cache.z1[static_cast<std::size_t>(i)].array() > 0.0).cast<scalar_t>().matrix());

    // layer 1
    for (int o = 0; o < 8; ++o) {
        grads.c1.b(o) = delta1[static_cast<std::size_t>(o)].sum();
        for (int i = 0; i < 2; ++i)
            corr3x3_acc(delta1[static_cast<std::size_t>(o)], cache.x[static_cast<std::size_t>(i)],
                        grads.c1.kernel(o, i));
    }
    return grads.flatten();
}

void adam_step(vec_t& theta, const vec_t& grad, AdamState& state, scalar_t lr,
               const AdamConfig& adam) {
    if (!grad.allFinite()) throw std::runtime_error("adam_step: non-finite gradient");
    state.t += 1;
    state.m = adam.beta1 * state.m + (1.0 - adam.beta1) * grad;
    state.v = adam.beta2 * state.v + (1.0 - adam.beta2) * grad.cwiseProduct(grad);
    const scalar_t mc = 1.0 - std::pow(adam.beta1, static_cast<scalar_t>(state.t));
    const scalar_t vc = 1.0 - std::pow(adam.beta2, static_cast<scalar_t>(state.t));
    theta -= lr * (state.m / mc).cwiseQuotient(((state.v / vc).cwiseSqrt().array() + adam.eps).matrix());
}

scalar_t mean_mse(const ModelParams& params, const std::vector<DatasetSample>& samples, int lo,
                  int hi) {
    if (hi <= lo) return 0.0;
    const std::int64_t n = hi - lo;
    const std::int64_t block = 16;
    const std::int64_t n_blocks = block_count(n, block);
    std::vector<scalar_t> sums(static_cast<std::size_t>(n_blocks), 0.0);
    parallel_blocks(n, block, [&](std::int64_t b, std::int64_t blo, std::int64_t bhi) {
        scalar_t s = 0.0;
        for (std::int64_t i = blo; i < bhi; ++i) {
            const auto& sample = samples[static_cast<std::size_t>(lo + i)];
            s += loss_mse(forward(params, sample.feature), sample.label);
        }
        sums[static_cast<std::size_t>(b)] = s;
    });
    scalar_t total = 0.0;
    for (scalar_t s : sums) total += s;
    return total / static_cast<scalar_t>(n);
}

TrainResult train(const Dataset& dataset, const TrainConfig& cfg) {
    if (dataset.samples.empty()) throw std::invalid_argument("train: empty dataset");
    const auto& first = dataset.samples.front();
    NetShape shape;
    shape.in_rows = static_cast<int>(first.feature.rows());
    shape.in_cols = static_cast<int>(first.feature.cols());
    shape.out_rows = static_cast<int>(first.label.rows());
    shape.out_cols = static_cast<int>(first.label.cols());
    shape.resize_first = cfg.resize_first;

    const auto [n_train, n_val] = split_counts(dataset.size(), cfg.split);
    if (n_train < 1) throw std::invalid_argument("train: split leaves no training samples");

    ModelParams params = ModelParams::glorot(shape, mix_seed(cfg.seed, 0x696e6974ULL));
    vec_t theta = params.flatten();
    AdamState state = AdamState::zeros(static_cast<int>(theta.size()));
    const std::uint64_t shuffle_seed =
        cfg.shuffle_seed ? *cfg.shuffle_seed : mix_seed(cfg.seed, 0x73687566ULL);

    std::vector<int> order(static_cast<std::size_t>(n_train));
    for (int i = 0; i < n_train; ++i) order[static_cast<std::size_t>(i)] = i;

    TrainResult result;
    vec_t last_finite = theta;
    for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        const scalar_t lr = cfg.initial_lr *
                            std::pow(cfg.lr_drop_factor,
                                     std::floor(static_cast<scalar_t>(epoch) /
                                                static_cast<scalar_t>(cfg.lr_drop_period)));
        Rng shuffle_rng(mix_seed(shuffle_seed, static_cast<std::uint64_t>(epoch)));
        for (int i = n_train - 1; i > 0; --i)
            std::swap(order[static_cast<std::size_t>(i)],
                      order[static_cast<std::size_t>(shuffle_rng.uniform_int(i + 1))]);

        params.unflatten(theta);
        scalar_t epoch_loss = 0.0;
        int n_batches = 0;
        bool bad = false;
        for (int start = 0; start < n_train; start += cfg.minibatch) {
            const int batch = std::min(cfg.minibatch, n_train - start);
            std::vector<vec_t> sample_grads(static_cast<std::size_t>(batch));
            std::vector<scalar_t> sample_loss(static_cast<std::size_t>(batch), 0.0);
            parallel_blocks(batch, 8, [&](std::int64_t, std::int64_t lo, std::int64_t hi) {
                for (std::int64_t j = lo; j < hi; ++j) {
                    const auto& sample =
                        dataset.samples[static_cast<std::size_t>(order[static_cast<std::size_t>(start + j)])];
                    sample_grads[static_cast<std::size_t>(j)] =
                        backward(params, sample.feature, sample.label,
                                 &sample_loss[static_cast<std::size_t>(j)]);
                }
            });
            vec_t grad = vec_t::Zero(theta.size());
            scalar_t batch_loss = 0.0;
            for (int j = 0; j < batch; ++j) {
                grad += sample_grads[static_cast<std::size_t>(j)];
                batch_loss += sample_loss[static_cast<std::size_t>(j)];
            }
            grad /= static_cast<scalar_t>(batch);
            batch_loss /= static_cast<scalar_t>(batch);
            if (!std::isfinite(batch_loss) || !grad.allFinite()) {
                bad = true;
                break;
            }
            adam_step(theta, grad, state, lr, cfg.adam);
            params.unflatten(theta);
            epoch_loss += batch_loss;
            ++n_batches;
        }
        if (bad || !theta.allFinite()) {
            result.log.aborted_non_finite = true;
            theta = last_finite;
            break;
        }
        last_finite = theta;
        result.log.lr.push_back(lr);
        result.log.train_loss.push_back(n_batches ? epoch_loss / n_batches : 0.0);
        params.unflatten(theta);
        result.log.val_mse.push_back(
            n_val > 0 ? mean_mse(params, dataset.samples, n_train, dataset.size()) : 0.0);
    }
    params.unflatten(theta);
    result.params = params;
    return result;
}

namespace {

constexpr char kModelMagic[4] = {'C', 'E', 'M', 'D'};
constexpr std::uint16_t kModelVersion = 1;

template <typename T>
void write_pod(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw std::runtime_error("model file truncated");
    return v;
}

}  // namespace

void save_model(const ModelParams& params, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.write(kModelMagic, 4);
    write_pod<std::uint16_t>(out, kModelVersion);
    write_pod<std::uint16_t>(out, params.shape.resize_first ? 1 : 0);
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(params.shape.in_rows));
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(params.shape.in_cols));
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(params.shape.out_rows));
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(params.shape.out_cols));
    write_pod<std::uint32_t>(out, 3u);
    for (const ConvLayer* layer : {&params.c1, &params.c2, &params.c3}) {
        write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(layer->out_ch));
        write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(layer->in_ch));
        write_pod<std::uint32_t>(out, 3u);
        write_pod<std::uint32_t>(out, 3u);
    }
    write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(params.param_count()));
    const vec_t theta = params.flatten();
    out.write(reinterpret_cast<const char*>(theta.data()),
              static_cast<std::streamsize>(sizeof(scalar_t) * static_cast<std::size_t>(theta.size())));
    if (!out) throw std::runtime_error("write failed: " + path);
}

ModelParams load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open model: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kModelMagic, 4) != 0)
        throw std::runtime_error("bad model magic in " + path + " (expected \"CEMD\")");
    const auto version = read_pod<std::uint16_t>(in);
    if (version != kModelVersion)
        throw std::runtime_error("unsupported model version " + std::to_string(version));

    NetShape shape;
    shape.resize_first = read_pod<std::uint16_t>(in) != 0;
    shape.in_rows = static_cast<int>(read_pod<std::uint32_t>(in));
    shape.in_cols = static_cast<int>(read_pod<std::uint32_t>(in));
    shape.out_rows = static_cast<int>(read_pod<std::uint32_t>(in));
    shape.out_cols = static_cast<int>(read_pod<std::uint32_t>(in));
    const auto n_layers = read_pod<std::uint32_t>(in);
    if (n_layers != 3) throw std::runtime_error("unexpected layer count in " + path);

    ModelParams params = ModelParams::zeros(shape);
    for (ConvLayer* layer : {&params.c1, &params.c2, &params.c3}) {
        const auto out_ch = read_pod<std::uint32_t>(in);
        const auto in_ch = read_pod<std::uint32_t>(in);
        const auto kh = read_pod<std::uint32_t>(in);
        const auto kw = read_pod<std::uint32_t>(in);
        if (static_cast<int>(out_ch) != layer->out_ch || static_cast<int>(in_ch) != layer->in_ch ||
            kh != 3 || kw != 3)
            throw std::runtime_error("unexpected layer geometry in " + path);
    }
    const auto count = read_pod<std::uint64_t>(in);
    if (count != static_cast<std::uint64_t>(params.param_count()))
        throw std::runtime_error("parameter count mismatch in " + path);
    vec_t theta(params.param_count());
    in.read(reinterpret_cast<char*>(theta.data()),
            static_cast<std::streamsize>(sizeof(scalar_t) * static_cast<std::size_t>(theta.size())));
    if (!in) throw std::runtime_error("model file truncated: " + path);
    params.unflatten(theta);
    return params;
}

}  // namespace chanest
