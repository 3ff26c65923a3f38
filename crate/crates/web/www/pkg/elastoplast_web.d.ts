/* tslint:disable */
/* eslint-disable */

export class BoxSolution {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Stopping criterion of every Newton iteration in order.
     */
    readonly criteria: Float64Array;
    /**
     * Time step of every entry in `criteria`.
     */
    readonly criterion_steps: Uint32Array;
    /**
     * Node displacements, three per node.
     */
    readonly displacement: Float64Array;
    /**
     * Node coordinates, three per node.
     */
    readonly nodes: Float64Array;
    readonly pcgp_iterations: number;
    /**
     * 1 for tets that yielded in the last step.
     */
    readonly plastic: Uint8Array;
    /**
     * Four node indices per tet.
     */
    readonly tets: Uint32Array;
    /**
     * Frobenius norm of the stress deviator per tet.
     */
    readonly von_mises: Float64Array;
}

export class PcgpHistories {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly dirichlet: Float64Array;
    readonly lumped: Float64Array;
    readonly none: Float64Array;
}

/**
 * Relative residual histories for the elastic cantilever problem.
 */
export function pcgp_histories(refinement: number, subdomains: number, eps: number): PcgpHistories;

/**
 * Cantilever `4 x 1 x 1` clamped at `x = 0`, pulled along `z` at `x = 4` by
 * `amplitude sin(2 pi t)` on `[0, 1/4]`.
 */
export function solve_box(refinement: number, amplitude: number, steps: number, subdomains: number, preconditioner: string): BoxSolution;

/**
 * Flat `(strain, stress, kappa)` triples along `0 -> +max -> -max -> +max`.
 */
export function uniaxial_response(young: number, poisson: number, sigma_y: number, hardening: number, max_strain: number, points_per_leg: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_boxsolution_free: (a: number, b: number) => void;
    readonly __wbg_pcgphistories_free: (a: number, b: number) => void;
    readonly boxsolution_criteria: (a: number) => [number, number];
    readonly boxsolution_criterion_steps: (a: number) => [number, number];
    readonly boxsolution_displacement: (a: number) => [number, number];
    readonly boxsolution_nodes: (a: number) => [number, number];
    readonly boxsolution_pcgp_iterations: (a: number) => number;
    readonly boxsolution_plastic: (a: number) => [number, number];
    readonly boxsolution_tets: (a: number) => [number, number];
    readonly boxsolution_von_mises: (a: number) => [number, number];
    readonly pcgp_histories: (a: number, b: number, c: number) => [number, number, number];
    readonly pcgphistories_dirichlet: (a: number) => [number, number];
    readonly pcgphistories_lumped: (a: number) => [number, number];
    readonly pcgphistories_none: (a: number) => [number, number];
    readonly solve_box: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
    readonly uniaxial_response: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
