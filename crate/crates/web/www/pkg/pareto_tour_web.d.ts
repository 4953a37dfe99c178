/* tslint:disable */
/* eslint-disable */

/**
 * Concave test problem: `k` decomposition points and `weights` linear
 * scalarization points, as an array of CSV-shaped row objects.
 */
export function concaveFront(k: number, weights: number): string;

/**
 * Exact hypervolume percentage of `[f1, f2, f1, f2, ...]` against `(r1, r2)`.
 */
export function hypervolume(flat: Float64Array, r1: number, r2: number): number;

/**
 * Random Euclidean instance with `n` cities, solved for `prefs` preferences.
 * Returns `{coords, front: [{tour, f1, f2}], hv_pct, ref}`.
 */
export function solveRandom(n: number, prefs: number, inner_moves: number, seed: bigint): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly concaveFront: (a: number, b: number) => [number, number, number, number];
    readonly hypervolume: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly solveRandom: (a: number, b: number, c: number, d: bigint) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
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
