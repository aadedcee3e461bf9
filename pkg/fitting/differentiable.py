"""
Differentiable Jet Fitting
Location: jetnormals/fitting/differentiable.py

Torch counterparts of the jet operations used inside the learned pipeline.
The weighted solve runs the same QR solver as the numpy path in its forward
pass; its backward pass differentiates the optimality condition
(M^T W M) beta = M^T W B implicitly, reusing the saved R factor.
All functions accept leading batch dimensions.
"""

from typing import List, Tuple

import numpy as np
import torch
from torch.linalg import solve_triangular

from fitting.jets import monomial_exponents, solve_weighted_system


def _powers(values: torch.Tensor, n: int) -> List[torch.Tensor]:
    """[1, v, v^2, ..., v^n] by repeated products (no pow, so gradients stay finite at 0)"""
    powers = [torch.ones_like(values)]
    for _ in range(n):
        powers.append(powers[-1] * values)
    return powers


def vandermonde_tensor(xy: torch.Tensor, n: int) -> torch.Tensor:
    """(..., k, 2) coordinates -> (..., k, N_n) monomial matrix"""
    x_pows = _powers(xy[..., 0], n)
    y_pows = _powers(xy[..., 1], n)
    return torch.stack([x_pows[a] * y_pows[b] for a, b in monomial_exponents(n)], dim=-1)


def jet_gradient_tensor(beta: torch.Tensor, xy: torch.Tensor, n: int) -> Tuple[torch.Tensor, torch.Tensor]:
    """df/dx and df/dy of the jet at each (x, y); beta is (..., N_n), xy is (..., k, 2)"""
    x_pows = _powers(xy[..., 0], n)
    y_pows = _powers(xy[..., 1], n)
    dfdx = torch.zeros_like(xy[..., 0])
    dfdy = torch.zeros_like(xy[..., 0])
    for column, (a, b) in enumerate(monomial_exponents(n)):
        coefficient = beta[..., column:column + 1]
        if a > 0:
            dfdx = dfdx + coefficient * a * x_pows[a - 1] * y_pows[b]
        if b > 0:
            dfdy = dfdy + coefficient * b * x_pows[a] * y_pows[b - 1]
    return dfdx, dfdy


def normal_from_beta_tensor(beta: torch.Tensor) -> torch.Tensor:
    """(-beta_10, -beta_01, 1) normalized, per batch entry"""
    normal = torch.stack((-beta[..., 1], -beta[..., 2], torch.ones_like(beta[..., 0])), dim=-1)
    return normal / torch.sqrt(torch.sum(normal * normal, dim=-1, keepdim=True))


def neighbor_normals_tensor(beta: torch.Tensor, xy: torch.Tensor, n: int) -> torch.Tensor:
    """Unit jet-surface normals at each (x, y)"""
    dfdx, dfdy = jet_gradient_tensor(beta, xy, n)
    normals = torch.stack((-dfdx, -dfdy, torch.ones_like(dfdx)), dim=-1)
    return normals / torch.sqrt(torch.sum(normals * normals, dim=-1, keepdim=True))


class WeightedJetSolve(torch.autograd.Function):
    """beta = argmin ||W^1/2 (M beta - B)||^2 with an implicit-function backward"""

    @staticmethod
    def forward(ctx, vandermonde, weights, heights):
        m_np = vandermonde.detach().cpu().numpy()
        w_np = weights.detach().cpu().numpy()
        z_np = heights.detach().cpu().numpy()

        betas, r_factors, ridge_flags = [], [], []
        for m_b, w_b, z_b in zip(m_np.reshape(-1, *m_np.shape[-2:]),
                                 w_np.reshape(-1, w_np.shape[-1]),
                                 z_np.reshape(-1, z_np.shape[-1])):
            solution = solve_weighted_system(m_b, w_b, z_b)
            betas.append(solution.beta)
            r_factors.append(solution.r_factor)
            ridge_flags.append(solution.diagnostics.ridge_applied)

        batch_shape = m_np.shape[:-2]
        n_terms = m_np.shape[-1]
        beta = torch.from_numpy(np.stack(betas).reshape(*batch_shape, n_terms)).to(vandermonde)
        r_factor = torch.from_numpy(np.stack(r_factors).reshape(*batch_shape, n_terms, n_terms)).to(vandermonde)
        ridge = torch.tensor(ridge_flags, dtype=torch.bool).reshape(batch_shape)

        ctx.save_for_backward(vandermonde, weights, heights, beta, r_factor)
        ctx.mark_non_differentiable(ridge)
        return beta, ridge

    @staticmethod
    def backward(ctx, grad_beta, grad_ridge):
        vandermonde, weights, heights, beta, r_factor = ctx.saved_tensors

        # u = (M^T W M)^-1 g through R^T R
        lower = solve_triangular(r_factor.transpose(-1, -2), grad_beta.unsqueeze(-1), upper=False)
        u = solve_triangular(r_factor, lower, upper=True).squeeze(-1)

        m_u = (vandermonde @ u.unsqueeze(-1)).squeeze(-1)
        residual = heights - (vandermonde @ beta.unsqueeze(-1)).squeeze(-1)

        grad_weights = m_u * residual
        grad_heights = weights * m_u
        grad_vandermonde = ((weights * residual).unsqueeze(-1) * u.unsqueeze(-2)
                            - (weights * m_u).unsqueeze(-1) * beta.unsqueeze(-2))
        return grad_vandermonde, grad_weights, grad_heights


def weighted_jet_fit(points: torch.Tensor, weights: torch.Tensor, n: int) -> Tuple[torch.Tensor, torch.Tensor]:
    """Differentiable WLS jet through (..., k, 3) points; returns (beta, ridge flags)"""
    vandermonde = vandermonde_tensor(points[..., :2], n)
    return WeightedJetSolve.apply(vandermonde, weights, points[..., 2])
