/* tslint:disable */
/* eslint-disable */

/**
 * φ(η, ξ) at the cell centres of an `n × n` grid, row-major with η along
 * rows. Cell centres never land on the corner vortex.
 */
export function phi_field(n: number): Float64Array;

/**
 * ψ at `q = −qmax, −qmax+step, …, qmax`.
 */
export function psi_curve(qmax: number, step: number): Float64Array;

/**
 * Four quarter periods of `|a, b⟩` as JSON: per step, the dominant site,
 * its probability and the phase of its amplitude (in turns).
 */
export function quarter_orbit(a: number, b: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly phi_field: (a: number) => [number, number, number, number];
    readonly psi_curve: (a: number, b: number) => [number, number, number, number];
    readonly quarter_orbit: (a: number, b: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
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
