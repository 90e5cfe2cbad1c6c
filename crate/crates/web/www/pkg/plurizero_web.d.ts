/* tslint:disable */
/* eslint-disable */

/**
 * `(1/2n) log Γₙ` along the positive real axis against `V_K`, as rows
 * `[r, approximation, limit]`. `kind` is `disk` (circle-orthonormal basis)
 * or `interval` (Chebyshev basis on `[−1, 1]`).
 */
export function extremal_profile(kind: string, n: number, r_max: number, points: number): Float64Array;

/**
 * Zeros of a random Fubini–Study section of `O(n)` on the sphere: flat
 * `[x, y, z, …]` followed by the 16 cap masses and their FS areas.
 */
export function sphere_zeros(n: number, seed: bigint): Float64Array;

/**
 * Zeros of `Σ aⱼ zʲ` with i.i.d. coefficients, as `[re₀, im₀, re₁, im₁, …]`.
 */
export function zeros_sample(law_name: string, gamma: number, n: number, seed: bigint): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly extremal_profile: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly sphere_zeros: (a: number, b: bigint) => [number, number, number, number];
    readonly zeros_sample: (a: number, b: number, c: number, d: number, e: bigint) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
